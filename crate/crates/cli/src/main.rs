mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "orbitlab", version, about = "Multiplicative dependence in orbits of rational maps over Q")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Never changes output.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Reuse results keyed by a hash of the run manifest.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Write JSON lines (manifest first) here instead of stdout, plus a
    /// `<output>.manifest.json` sidecar.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML file of default flag values; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Weil height of a point.
    Height(PointArgs),
    /// Certified enclosure of the canonical height.
    CanonicalHeight(CanonicalHeightArgs),
    /// Decide whether a point is preperiodic.
    Preperiodic(MapPointArgs),
    /// Ramification index at a point, or all critical points.
    Ramify(RamifyArgs),
    /// Exceptional points (finite backward orbit).
    Exceptional(MapArgs),
    /// Match against the special forms.
    Classify(MapArgs),
    /// Primes of bad reduction.
    Reduction(MapArgs),
    /// Finitely generated subgroups of Q*.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Orbit searches.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Primitive prime divisors along an orbit.
    Zsigmondy(ZsigmondyArgs),
    /// Genus of F(X) = c G(X) Y^m.
    Genus(CurveArgs),
    /// Singular points of the projective closure of F(X) = c G(X) Y^m.
    Singulars(CurveArgs),
    /// Genus and zero case of the dependence curve for f^(n).
    CurveClassify(CurveClassifyArgs),
    /// Bounds for split multilinear relations.
    #[command(subcommand)]
    Bound(BoundCommand),
}

#[derive(Args, Debug, Serialize)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Args, Debug, Serialize)]
pub struct MapArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
}

#[derive(Args, Debug, Serialize)]
pub struct MapPointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Args, Debug, Serialize)]
pub struct CanonicalHeightArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct RamifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupCommand {
    /// Membership with exponent witness.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Generators of the saturation.
    Saturate {
        #[arg(long, allow_hyphen_values = true)]
        group: String,
    },
    /// Representatives of R_S^* / (R_S^*)^m.
    Cosets {
        /// Comma-separated primes.
        #[arg(long, allow_hyphen_values = true)]
        primes: String,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 100_000)]
        limit: u64,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct SearchCommon {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    /// Comma-separated generators; `--group -- "-1,2"` is accepted.
    #[arg(long, allow_hyphen_values = true)]
    pub group: String,
    #[arg(long, default_value_t = 10)]
    pub height: u64,
    /// Stop at the largest height whose point count fits; exits 3.
    #[arg(long)]
    pub max_points: Option<u64>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchCommand {
    /// Points with f(alpha) in the group.
    G(SearchCommon),
    /// Points with some iterate in the group.
    F {
        #[command(flatten)]
        #[serde(flatten)]
        common: SearchCommon,
        #[arg(long, default_value_t = 1)]
        nmin: usize,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Witnesses f^(n+k)(alpha)^r = u f^(k)(alpha)^s with u in the group.
    E {
        #[command(flatten)]
        #[serde(flatten)]
        common: SearchCommon,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = 2)]
        kmax: usize,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        rmin: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        rmax: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        smin: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        smax: i64,
        /// Keep preperiodic starting points.
        #[arg(long)]
        include_preperiodic: bool,
        /// Test membership in R_S^* for the support of the group.
        #[arg(long)]
        s_units: bool,
    },
    /// Pairs f^(m)(alpha), f^(n)(alpha) dependent modulo the group.
    Pairwise {
        #[command(flatten)]
        #[serde(flatten)]
        common: SearchCommon,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct ZsigmondyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long, default_value_t = 8)]
    pub nmax: usize,
    /// Count primes of the starting point as already seen.
    #[arg(long)]
    pub include_m0: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct CurveArgs {
    #[arg(long = "F", allow_hyphen_values = true)]
    #[serde(rename = "F")]
    pub f: String,
    #[arg(long = "G", allow_hyphen_values = true, default_value = "1")]
    #[serde(rename = "G")]
    pub g: String,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub c: String,
    #[arg(long)]
    pub m: String,
}

#[derive(Args, Debug, Serialize)]
pub struct CurveClassifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    #[arg(long)]
    pub n: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCommand {
    /// Height bound for starting points of split relations (degree >= 3).
    Thm19 {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        map: String,
    },
    /// Bound on the largest index; with --point also runs the search.
    N1 {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// Lower bound for canonical heights of wandering points; computed if absent.
        #[arg(long)]
        c2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Largest index searched when the bound does not apply.
        #[arg(long, default_value_t = 12)]
        cap: usize,
    },
}

fn main() -> ExitCode {
    run::main()
}
