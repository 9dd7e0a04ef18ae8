//! Named kernel generators, so experiment and verification runs are
//! reproducible without shipping fixture files.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::Submodule;

/// A reproducible kernel recipe for a given ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `{0}`: the sketch stores the exact frequency vector.
    Zero,
    /// `Z^n`: the sketch stores nothing.
    Full,
    /// `span{(1, 1, ..., 1)}`.
    Repetition,
    /// `span{e_1, ..., e_k}`: the first `k` coordinates are forgotten.
    Axis(usize),
    /// `span{q_1 e_1, q_2 e_2, ...}`: modular counters on a prefix of the
    /// coordinates.
    DiagonalMod(Vec<u64>),
    /// `span{(c, c, ..., c)}`: a torsion variant of the repetition kernel
    /// whose saturation is the repetition kernel itself.
    ScaledRepetition(u64),
    /// Seeded random generator matrix with small entries, canonicalized.
    RandomHnf(u64),
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelKind::Zero => write!(f, "zero"),
            KernelKind::Full => write!(f, "full"),
            KernelKind::Repetition => write!(f, "repetition"),
            KernelKind::Axis(k) => write!(f, "axis({k})"),
            KernelKind::DiagonalMod(qs) => {
                let s: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
                write!(f, "diagonal-mod({})", s.join(","))
            }
            KernelKind::ScaledRepetition(c) => write!(f, "scaled-repetition({c})"),
            KernelKind::RandomHnf(seed) => write!(f, "random-hnf({seed})"),
        }
    }
}

/// Parses generator names: `zero`, `full`, `repetition`, `axis(k)`,
/// `diagonal-mod(q1,q2,...)`, `scaled-repetition(c)`, `random-hnf(seed)`.
pub fn parse_kind(name: &str) -> Result<KernelKind> {
    let name = name.trim();
    match name {
        "zero" => return Ok(KernelKind::Zero),
        "full" => return Ok(KernelKind::Full),
        "repetition" => return Ok(KernelKind::Repetition),
        _ => {}
    }
    let (head, args) = match name.split_once('(') {
        Some((h, rest)) if rest.ends_with(')') => (h, &rest[..rest.len() - 1]),
        _ => {
            return Err(Error::Malformed(format!(
                "unknown kernel generator {name:?}"
            )))
        }
    };
    let parse_u64 = |s: &str| -> Result<u64> {
        s.trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad generator argument {s:?} in {name:?}")))
    };
    match head {
        "axis" => Ok(KernelKind::Axis(parse_u64(args)? as usize)),
        "scaled-repetition" => Ok(KernelKind::ScaledRepetition(parse_u64(args)?)),
        "random-hnf" => Ok(KernelKind::RandomHnf(parse_u64(args)?)),
        "diagonal-mod" => {
            let qs = args
                .split(',')
                .map(parse_u64)
                .collect::<Result<Vec<u64>>>()?;
            if qs.is_empty() {
                return Err(Error::Malformed("diagonal-mod needs at least one modulus".into()));
            }
            Ok(KernelKind::DiagonalMod(qs))
        }
        _ => Err(Error::Malformed(format!(
            "unknown kernel generator {name:?}"
        ))),
    }
}

/// Instantiates a kernel recipe in dimension `n`.
pub fn generate(kind: &KernelKind, n: usize) -> Result<Submodule> {
    if n == 0 {
        return Err(Error::Malformed("ambient dimension must be positive".into()));
    }
    let e = |i: usize, scale: u64| -> Vec<BigInt> {
        let mut v = vec![BigInt::from(0); n];
        v[i] = BigInt::from(scale);
        v
    };
    match kind {
        KernelKind::Zero => Ok(Submodule::zero(n)),
        KernelKind::Full => Ok(Submodule::full(n)),
        KernelKind::Repetition => {
            Submodule::from_generator_rows(n, vec![vec![BigInt::from(1); n]])
        }
        KernelKind::ScaledRepetition(c) => {
            if *c == 0 {
                return Err(Error::Malformed("scaled-repetition needs c >= 1".into()));
            }
            Submodule::from_generator_rows(n, vec![vec![BigInt::from(*c); n]])
        }
        KernelKind::Axis(k) => {
            if *k > n {
                return Err(Error::Malformed(format!("axis({k}) exceeds dimension {n}")));
            }
            Submodule::from_generator_rows(n, (0..*k).map(|i| e(i, 1)).collect())
        }
        KernelKind::DiagonalMod(qs) => {
            if qs.len() > n {
                return Err(Error::Malformed(format!(
                    "diagonal-mod has {} moduli but dimension is {n}",
                    qs.len()
                )));
            }
            if qs.contains(&0) {
                return Err(Error::Malformed("diagonal-mod moduli must be >= 1".into()));
            }
            Submodule::from_generator_rows(
                n,
                qs.iter().enumerate().map(|(i, &q)| e(i, q)).collect(),
            )
        }
        KernelKind::RandomHnf(seed) => {
            for attempt in 0u64..32 {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32 ^ attempt << 48);
                let r = if n == 1 { 1 } else { rng.gen_range(1..n) };
                let rows: Vec<Vec<BigInt>> = (0..r)
                    .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect())
                    .collect();
                let m = Submodule::from_generator_rows(n, rows)?;
                if m.rank() >= 1 {
                    return Ok(m);
                }
            }
            Err(Error::Malformed(
                "random-hnf kept producing the zero module".into(),
            ))
        }
    }
}

/// The standard verification battery for dimension `n`: a fixed mix of free,
/// torsion and mixed kernels with reproducible names.
pub fn standard_battery(n: usize) -> Vec<(String, Submodule)> {
    let mut kinds = vec![KernelKind::Zero, KernelKind::Full];
    if n >= 2 {
        kinds.push(KernelKind::Axis(1));
    }
    kinds.push(KernelKind::DiagonalMod(vec![2]));
    if n >= 2 {
        kinds.push(KernelKind::DiagonalMod(vec![2, 3]));
    }
    kinds.push(KernelKind::ScaledRepetition(2));
    if n <= 2 {
        kinds.push(KernelKind::Repetition);
    }
    kinds.push(KernelKind::RandomHnf(34));
    kinds
        .into_iter()
        .map(|k| {
            let m = generate(&k, n).expect("standard battery recipes are valid");
            (k.to_string(), m)
        })
        .collect()
}
