//! Integer factorization: trial division up to 10^6, then Brent's variant of
//! Pollard rho with a fixed seed so runs are reproducible. Primality is
//! Miller-Rabin with the first thirteen prime bases, which is a proof below
//! 3.3e24; above that, 24 extra seeded random bases are added.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;
const RHO_SEED: u64 = 0x005e_ed0f_0b17;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (2..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

/// Prime factorization `sign * prod p^e` with primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub negative: bool,
    pub primes: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn product(&self) -> BigInt {
        let mag = self
            .primes
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        if self.negative {
            -BigInt::from(mag)
        } else {
            BigInt::from(mag)
        }
    }
}

/// Result of a factorization attempt under an iteration budget. Composite
/// cofactors that resisted the budget are kept in `unfactored`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFactorization {
    pub primes: Vec<(BigUint, u32)>,
    pub unfactored: Vec<BigUint>,
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn miller_rabin(n: &BigUint, base: &BigUint, d: &BigUint, s: u64) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let mut x = base.modpow(d, n);
    if x == one || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return false;
        }
        for &p in &MR_BASES {
            if small == p as u64 {
                return true;
            }
            if small % p as u64 == 0 {
                return false;
            }
        }
    } else {
        for &p in &MR_BASES {
            if (n % p).is_zero() {
                return false;
            }
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    for &b in &MR_BASES {
        if !miller_rabin(n, &BigUint::from(b), &d, s) {
            return false;
        }
    }
    // the 13 bases above are deterministic below 3.317e24
    let bound = BigUint::parse_bytes(b"3317044064679887385961981", 10).unwrap();
    if n < &bound {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RHO_SEED ^ n.bits());
    let two = BigUint::from(2u32);
    for _ in 0..24 {
        let a = rng.gen_biguint_range(&two, &n1);
        if !miller_rabin(n, &a, &d, s) {
            return false;
        }
    }
    true
}

/// One nontrivial divisor of odd composite `n`, or `None` when the budget
/// runs out. Brent's cycle detection with batched gcds.
fn brent_rho(n: &BigUint, budget: &mut u64, rng: &mut ChaCha8Rng) -> Option<BigUint> {
    let one = BigUint::one();
    while *budget > 0 {
        let c = rng.gen_biguint_range(&one, n);
        let mut y = rng.gen_biguint_range(&one, n);
        let m: u64 = 128;
        let mut g = one.clone();
        let mut r: u64 = 1;
        let mut q = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let f = |v: &BigUint| (v * v + &c) % n;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += steps;
                *budget = budget.saturating_sub(steps);
                if *budget == 0 && g == one {
                    return None;
                }
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

fn push_prime(out: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += e;
    } else {
        out.push((p, e));
    }
}

fn factor_magnitude(n: &BigUint, budget: Option<u64>) -> PartialFactorization {
    let mut primes = Vec::new();
    let mut unfactored = Vec::new();
    let mut rest = n.clone();
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            primes.push((pb, e));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RHO_SEED);
    let mut budget = budget.unwrap_or(u64::MAX);
    let mut stack = Vec::new();
    if !rest.is_one() {
        stack.push(rest);
    }
    while let Some(m) = stack.pop() {
        if is_prime(&m) {
            push_prime(&mut primes, m, 1);
            continue;
        }
        if let Some(root) = perfect_square_root(&m) {
            stack.push(root.clone());
            stack.push(root);
            continue;
        }
        match brent_rho(&m, &mut budget, &mut rng) {
            Some(g) => {
                let other = &m / &g;
                stack.push(g);
                stack.push(other);
            }
            None => unfactored.push(m),
        }
    }
    primes.sort();
    unfactored.sort();
    PartialFactorization { primes, unfactored }
}

fn perfect_square_root(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Complete factorization of a nonzero integer.
pub fn factor(n: &BigInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::domain("cannot factor 0"));
    }
    let part = factor_magnitude(n.magnitude(), None);
    debug_assert!(part.unfactored.is_empty());
    Ok(Factorization { negative: n.is_negative(), primes: part.primes })
}

/// Factorization that gives up on cofactors after `budget` rho iterations.
pub fn factor_with_budget(n: &BigUint, budget: u64) -> Result<PartialFactorization> {
    if n.is_zero() {
        return Err(Error::domain("cannot factor 0"));
    }
    Ok(factor_magnitude(n, Some(budget)))
}

/// Coprime base of a set of positive integers: pairwise coprime integers
/// `> 1` such that every input is a product of powers of them. Computed by
/// repeated gcd refinement, no factoring needed.
pub fn coprime_base(inputs: &[BigUint]) -> Vec<BigUint> {
    let mut base: Vec<BigUint> = Vec::new();
    for x in inputs {
        if x.is_zero() || x.is_one() {
            continue;
        }
        let mut pending = vec![x.clone()];
        while let Some(a) = pending.pop() {
            if a.is_one() {
                continue;
            }
            let mut split = None;
            for (i, b) in base.iter().enumerate() {
                let g = a.gcd(b);
                if !g.is_one() {
                    split = Some((i, g));
                    break;
                }
            }
            match split {
                None => base.push(a),
                Some((i, g)) => {
                    let b = base.swap_remove(i);
                    let b_rest = strip(&b, &g);
                    let a_rest = strip(&a, &g);
                    pending.push(g);
                    pending.push(b_rest);
                    pending.push(a_rest);
                }
            }
        }
    }
    base.sort();
    base
}

fn strip(x: &BigUint, g: &BigUint) -> BigUint {
    if g.is_one() {
        return x.clone();
    }
    let mut x = x.clone();
    while (&x % g).is_zero() {
        x /= g;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn factor_examples() {
        let f = factor(&BigInt::from(677)).unwrap();
        assert_eq!(f.primes, vec![(BigUint::from(677u32), 1)]);
        assert!(naive_is_prime(677));
        let f = factor(&BigInt::from(-12)).unwrap();
        assert!(f.negative);
        assert_eq!(f.primes, vec![(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]);
        let f = factor(&BigInt::one()).unwrap();
        assert!(f.primes.is_empty() && !f.negative);
        assert!(matches!(factor(&BigInt::zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn primality_agrees_with_naive() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime(&BigUint::from(n)), naive_is_prime(n), "{n}");
        }
        // Carmichael numbers and strong pseudoprimes to small bases
        for n in [561u64, 1105, 2047, 3215031751, 3825123056546413051] {
            assert!(!is_prime(&BigUint::from(n)));
        }
        assert!(is_prime(&BigUint::from(1_000_000_007u64)));
    }

    #[test]
    fn rho_splits_semiprime_beyond_trial_range() {
        let p = 1_000_003u64;
        let q = 998_244_353u64;
        let n = BigInt::from(p) * BigInt::from(q) * BigInt::from(q);
        let f = factor(&n).unwrap();
        assert_eq!(f.primes, vec![(BigUint::from(p), 1), (BigUint::from(q), 2)]);
        assert_eq!(f.product(), n);
    }

    #[test]
    fn budget_leaves_hard_cofactor() {
        // product of two 31-digit primes; far beyond a tiny rho budget
        let p = BigUint::parse_bytes(b"1000000000000000000000000000057", 10).unwrap();
        let q = BigUint::parse_bytes(b"1000000000000000000000000000099", 10).unwrap();
        assert!(is_prime(&p) && is_prime(&q));
        let n = &p * &q * 6u32;
        let part = factor_with_budget(&n, 2000).unwrap();
        assert_eq!(part.primes, vec![(BigUint::from(2u32), 1), (BigUint::from(3u32), 1)]);
        assert_eq!(part.unfactored, vec![&p * &q]);
    }

    #[test]
    fn coprime_base_refines() {
        let xs: Vec<BigUint> = [12u32, 18, 50].iter().map(|&v| BigUint::from(v)).collect();
        let base = coprime_base(&xs);
        for (i, a) in base.iter().enumerate() {
            for b in &base[i + 1..] {
                assert!(a.gcd(b).is_one());
            }
        }
        for x in &xs {
            let mut r = x.clone();
            for b in &base {
                r = strip(&r, b);
            }
            assert!(r.is_one());
        }
        assert_eq!(base, vec![BigUint::from(2u32), BigUint::from(3u32), BigUint::from(25u32)]);
    }
}
