//! Argument preprocessing, config merging, manifest, cache and output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{CommandFactory, FromArgMatches};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::commands::{execute, Outcome};
use crate::Cli;

/// Flags that steer the run but never change its output.
const RUN_FLAGS: [&str; 4] = ["jobs", "cache-dir", "output", "config"];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub map: Option<String>,
    pub group: Option<String>,
    /// Every other argument, defaults included.
    pub args: Value,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub budget_exceeded: Option<String>,
}

impl RunManifest {
    fn new(command: String, mut args: Value) -> Self {
        let mut take = |k: &str| args.as_object_mut().and_then(|o| o.remove(k)).and_then(|v| v.as_str().map(String::from));
        let map = take("map");
        let group = take("group");
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            map,
            group,
            args,
            c1: None,
            c2: None,
            budget_exceeded: None,
        }
    }

    /// Hash of the inputs; derived fields are not part of the key.
    fn cache_key(&self) -> String {
        let inputs = serde_json::to_vec(&(&self.tool, &self.version, &self.command, &self.map, &self.group, &self.args))
            .expect("manifest serializes");
        Sha256::digest(&inputs).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    manifest: RunManifest,
    lines: Vec<String>,
}

/// `--flag -- value` becomes `--flag=value`, so values may start with `-`.
fn join_separated_values(argv: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut i = 0;
    while i < argv.len() {
        let a = &argv[i];
        if a.starts_with("--") && a.len() > 2 && !a.contains('=') && argv.get(i + 1).is_some_and(|n| n == "--") {
            if let Some(v) = argv.get(i + 2) {
                out.push(format!("{a}={v}"));
                i += 3;
                continue;
            }
        }
        out.push(a.clone());
        i += 1;
    }
    out
}

fn flag_value(argv: &[String], name: &str) -> Option<String> {
    let eq = format!("--{name}=");
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == &format!("--{name}") {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix(&eq).map(String::from)
        }
    })
}

/// Appends `--key=value` for config keys the selected subcommand accepts
/// and the command line does not already set.
fn apply_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = flag_value(&argv, "config") else { return Ok(argv) };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing config {path}"))?;

    let mut root = Cli::command();
    root.build();
    let mut cmd = &root;
    for tok in argv.iter().skip(1) {
        if let Some(sub) = cmd.find_subcommand(tok) {
            cmd = sub;
        }
    }
    let known: Vec<String> = cmd.get_arguments().filter_map(|a| a.get_long().map(String::from)).collect();

    let mut extra = Vec::new();
    for (key, value) in &table {
        if RUN_FLAGS.contains(&key.as_str()) && key != "jobs" {
            continue;
        }
        if !known.contains(key) {
            return Err(anyhow!("config key {key:?} is not a flag of this command"));
        }
        let set = argv.iter().any(|a| a == &format!("--{key}") || a.starts_with(&format!("--{key}=")));
        if set {
            continue;
        }
        match value {
            toml::Value::Boolean(true) => extra.push(format!("--{key}")),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => extra.push(format!("--{key}={s}")),
            toml::Value::Integer(n) => extra.push(format!("--{key}={n}")),
            toml::Value::Float(x) => extra.push(format!("--{key}={x}")),
            other => return Err(anyhow!("config key {key:?}: unsupported value {other}")),
        }
    }
    argv.extend(extra);
    Ok(argv)
}

/// `(subcommand path, its arguments)` from the parsed command.
fn describe(cli: &Cli, matches: &clap::ArgMatches) -> (String, Value) {
    let mut path = Vec::new();
    let mut m = matches;
    while let Some((name, sub)) = m.subcommand() {
        path.push(name.to_string());
        m = sub;
    }
    let mut args = serde_json::to_value(&cli.command).expect("arguments serialize");
    for name in &path {
        args = match args {
            Value::Object(mut o) => o.remove(name).unwrap_or(Value::Null),
            other => other,
        };
    }
    if args.is_null() {
        args = Value::Object(Default::default());
    }
    (path.join(" "), args)
}

fn write_lines(w: &mut impl Write, lines: &[String]) -> std::io::Result<()> {
    let res = lines.iter().try_for_each(|l| writeln!(w, "{l}")).and_then(|_| w.flush());
    match res {
        // a closed reader (`| head`) is not an error
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn emit(cli: &Cli, manifest: &RunManifest, lines: &[String], wall_ms: u128, cached: bool) -> Result<()> {
    match &cli.output {
        None => {
            let stdout = std::io::stdout();
            write_lines(&mut stdout.lock(), lines)?;
        }
        Some(path) => {
            let mut buf = Vec::new();
            writeln!(buf, "{}", serde_json::to_string(&serde_json::json!({ "manifest": manifest }))?)?;
            write_lines(&mut buf, lines)?;
            fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
            let sidecar = serde_json::json!({ "manifest": manifest, "wall_time_ms": wall_ms, "cached": cached });
            fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)? + "\n")?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<orbitlab::Error>() {
        Some(orbitlab::Error::Resource { .. }) => 3,
        Some(_) => 2,
        None => 1,
    }
}

pub fn main() -> ExitCode {
    let argv = join_separated_values(std::env::args().collect());
    let argv = match apply_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("orbitlab: {e:#}");
            return ExitCode::from(2);
        }
    };
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches come from the same definition");
    match run(&cli, &matches) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("orbitlab: {e:#}");
            if let Some(orbitlab::Error::Resource { partial: Some(p), .. }) = e.downcast_ref::<orbitlab::Error>() {
                println!("{}", serde_json::json!({ "partial": p }));
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli, matches: &clap::ArgMatches) -> Result<u8> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(orbitlab::Error::Argument("--jobs must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let (command, args) = describe(cli, matches);
    let mut manifest = RunManifest::new(command, args);
    let start = Instant::now();

    let cache_file = cli.cache_dir.as_ref().map(|d| d.join(format!("{}.json", manifest.cache_key())));
    if let Some(file) = cache_file.as_ref().filter(|f| f.exists()) {
        let entry: CacheEntry = serde_json::from_slice(&fs::read(file)?)
            .with_context(|| format!("reading cache entry {}", file.display()))?;
        emit(cli, &entry.manifest, &entry.lines, start.elapsed().as_millis(), true)?;
        return Ok(0);
    }

    let Outcome { lines, c1, c2, budget } = execute(&cli.command)?;
    manifest.c1 = c1;
    manifest.c2 = c2;
    manifest.budget_exceeded = budget.clone();
    emit(cli, &manifest, &lines, start.elapsed().as_millis(), false)?;
    if let Some(note) = budget {
        eprintln!("orbitlab: budget exceeded: {note}");
        return Ok(3);
    }
    if let Some(file) = cache_file {
        if let Some(dir) = file.parent() {
            fs::create_dir_all(dir)?;
        }
        let entry = CacheEntry { manifest, lines };
        fs::write(&file, serde_json::to_vec(&entry)?).with_context(|| format!("writing {}", file.display()))?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn separated_values_are_joined() {
        let got = join_separated_values(v(&["orbitlab", "search", "e", "--group", "--", "-1,2", "--height", "3"]));
        assert_eq!(got, v(&["orbitlab", "search", "e", "--group=-1,2", "--height", "3"]));
        assert_eq!(join_separated_values(v(&["a", "--x", "--"])), v(&["a", "--x", "--"]));
    }

    #[test]
    fn cache_key_ignores_derived_fields() {
        let a = RunManifest::new("genus".into(), serde_json::json!({ "F": "X^3-X", "m": "5" }));
        let mut b = a.clone();
        b.c1 = Some(1.0);
        assert_eq!(a.cache_key(), b.cache_key());
        let c = RunManifest::new("genus".into(), serde_json::json!({ "F": "X^3-X", "m": "7" }));
        assert_ne!(a.cache_key(), c.cache_key());
    }
}
