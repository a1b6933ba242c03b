//! Metric vector space backends.
//!
//! Every other module is generic over a [`Space`]: linear operations plus
//! an invariant metric, with declared property flags. Shipped backends:
//!
//! * `euclidean:<n>` — finite Euclidean space on dense vectors;
//! * `omega-sup:<M>` / `omega-sum:<M>` — truncated product metrics on
//!   sequence prefixes, `sup_i min(|x_i-y_i|,1)/i` and
//!   `sum_i min(|x_i-y_i|,1)/2^i`;
//! * `lp:<p>:<M>` / `linf:<M>` — truncated sequence norms;
//! * `l1gamma` — sparse absolutely-summable families over string labels.
//!
//! All metrics depend only on `x - y`, so they are translation invariant.
//! The norm-induced metrics scale homogeneously; the product metrics
//! violate the scaling inequality `d(λx, λy) <= λ d(x, y)` once a
//! coordinate difference crosses the clamp at 1, and carry a `Violated`
//! flag that downstream reports surface as a hypothesis annotation.
//!
//! Coordinate reductions run in a fixed left-to-right order; nothing here
//! re-associates floating-point sums.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;

/// An element of a metric vector space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorValue {
    /// Finite-dimensional coordinates.
    Dense(Vec<f64>),
    /// Finite prefix of an infinite sequence; coordinates beyond the
    /// prefix are implicitly zero.
    Prefix(Vec<f64>),
    /// Finitely supported family over string labels; never stores zeros.
    Sparse(BTreeMap<String, f64>),
}

impl VectorValue {
    pub fn sparse_from(entries: &[(&str, f64)]) -> VectorValue {
        let mut m = BTreeMap::new();
        for (k, v) in entries {
            if *v != 0.0 {
                m.insert((*k).to_string(), *v);
            }
        }
        VectorValue::Sparse(m)
    }

    /// Coordinate by 1-based index for dense/prefix values.
    pub fn coordinate(&self, i: usize) -> Option<f64> {
        match self {
            VectorValue::Dense(v) | VectorValue::Prefix(v) => {
                if i >= 1 && i <= v.len() {
                    Some(v[i - 1])
                } else {
                    None
                }
            }
            VectorValue::Sparse(_) => None,
        }
    }
}

/// Whether the scaling inequality `d(λx,λy) <= λ d(x,y)` (λ in [0,1))
/// holds for a backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingFlag {
    Holds,
    Violated,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    Euclidean { dim: usize },
    OmegaSup { prefix: usize },
    OmegaSum { prefix: usize },
    Lp { p: f64, prefix: usize },
    LInf { prefix: usize },
    L1Gamma,
}

/// A metric vector space backend with its declared property flags.
#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    kind: SpaceKind,
}

impl Space {
    pub fn euclidean(dim: usize) -> Space {
        assert!(dim >= 1);
        Space { kind: SpaceKind::Euclidean { dim } }
    }

    pub fn omega_sup(prefix: usize) -> Space {
        assert!(prefix >= 1);
        Space { kind: SpaceKind::OmegaSup { prefix } }
    }

    pub fn omega_sum(prefix: usize) -> Space {
        assert!(prefix >= 1);
        Space { kind: SpaceKind::OmegaSum { prefix } }
    }

    pub fn lp(p: f64, prefix: usize) -> Result<Space> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("lp exponent must be in [1, inf), got {p}")));
        }
        assert!(prefix >= 1);
        Ok(Space { kind: SpaceKind::Lp { p, prefix } })
    }

    pub fn linf(prefix: usize) -> Space {
        assert!(prefix >= 1);
        Space { kind: SpaceKind::LInf { prefix } }
    }

    pub fn l1_gamma() -> Space {
        Space { kind: SpaceKind::L1Gamma }
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// Prefix length for sequence backends.
    pub fn prefix_len(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::OmegaSup { prefix }
            | SpaceKind::OmegaSum { prefix }
            | SpaceKind::Lp { prefix, .. }
            | SpaceKind::LInf { prefix } => Some(prefix),
            _ => None,
        }
    }

    /// Every shipped metric depends only on `x - y`.
    pub fn translation_invariant(&self) -> bool {
        true
    }

    /// Declared scaling-inequality flag; the probe reproduces it.
    pub fn scaling_flag(&self) -> ScalingFlag {
        match self.kind {
            SpaceKind::OmegaSup { .. } | SpaceKind::OmegaSum { .. } => ScalingFlag::Violated,
            _ => ScalingFlag::Holds,
        }
    }

    /// Annotations that probes attach to reports built over this space.
    pub fn hypothesis_annotations(&self) -> Vec<String> {
        match self.scaling_flag() {
            ScalingFlag::Violated => vec!["scaling-inequality-violated".to_string()],
            _ => vec![],
        }
    }

    /// Additive identity.
    pub fn zero(&self) -> VectorValue {
        match self.kind {
            SpaceKind::Euclidean { dim } => VectorValue::Dense(vec![0.0; dim]),
            SpaceKind::OmegaSup { prefix }
            | SpaceKind::OmegaSum { prefix }
            | SpaceKind::Lp { prefix, .. }
            | SpaceKind::LInf { prefix } => VectorValue::Prefix(vec![0.0; prefix]),
            SpaceKind::L1Gamma => VectorValue::Sparse(BTreeMap::new()),
        }
    }

    /// Unit basis vector `e_i` (1-based). For the sparse backend the
    /// label is the decimal index.
    pub fn basis(&self, i: usize) -> Result<VectorValue> {
        if i == 0 {
            return Err(Error::Domain("basis index is 1-based".into()));
        }
        match self.kind {
            SpaceKind::Euclidean { dim } => {
                if i > dim {
                    return Err(Error::Domain(format!("basis index {i} > dimension {dim}")));
                }
                let mut v = vec![0.0; dim];
                v[i - 1] = 1.0;
                Ok(VectorValue::Dense(v))
            }
            SpaceKind::OmegaSup { prefix }
            | SpaceKind::OmegaSum { prefix }
            | SpaceKind::Lp { prefix, .. }
            | SpaceKind::LInf { prefix } => {
                if i > prefix {
                    return Err(Error::Capability(format!(
                        "basis index {i} exceeds truncation {prefix}"
                    )));
                }
                let mut v = vec![0.0; prefix];
                v[i - 1] = 1.0;
                Ok(VectorValue::Prefix(v))
            }
            SpaceKind::L1Gamma => Ok(VectorValue::sparse_from(&[(&i.to_string(), 1.0)])),
        }
    }

    fn check(&self, x: &VectorValue) -> Result<()> {
        match (&self.kind, x) {
            (SpaceKind::Euclidean { dim }, VectorValue::Dense(v)) if v.len() == *dim => Ok(()),
            (SpaceKind::OmegaSup { prefix }, VectorValue::Prefix(v))
            | (SpaceKind::OmegaSum { prefix }, VectorValue::Prefix(v))
            | (SpaceKind::Lp { prefix, .. }, VectorValue::Prefix(v))
            | (SpaceKind::LInf { prefix }, VectorValue::Prefix(v))
                if v.len() == *prefix =>
            {
                Ok(())
            }
            (SpaceKind::L1Gamma, VectorValue::Sparse(_)) => Ok(()),
            _ => Err(Error::Representation(format!(
                "value {x:?} does not belong to space {self}"
            ))),
        }
    }

    pub fn add(&self, x: &VectorValue, y: &VectorValue) -> Result<VectorValue> {
        self.zip(x, y, |a, b| a + b)
    }

    pub fn sub(&self, x: &VectorValue, y: &VectorValue) -> Result<VectorValue> {
        self.zip(x, y, |a, b| a - b)
    }

    fn zip(&self, x: &VectorValue, y: &VectorValue, op: impl Fn(f64, f64) -> f64) -> Result<VectorValue> {
        self.check(x)?;
        self.check(y)?;
        match (x, y) {
            (VectorValue::Dense(a), VectorValue::Dense(b)) => {
                Ok(VectorValue::Dense(a.iter().zip(b).map(|(u, v)| op(*u, *v)).collect()))
            }
            (VectorValue::Prefix(a), VectorValue::Prefix(b)) => {
                Ok(VectorValue::Prefix(a.iter().zip(b).map(|(u, v)| op(*u, *v)).collect()))
            }
            (VectorValue::Sparse(a), VectorValue::Sparse(b)) => {
                let mut out = BTreeMap::new();
                for k in a.keys().chain(b.keys()) {
                    if out.contains_key(k) {
                        continue;
                    }
                    let v = op(*a.get(k).unwrap_or(&0.0), *b.get(k).unwrap_or(&0.0));
                    if v != 0.0 {
                        out.insert(k.clone(), v);
                    }
                }
                Ok(VectorValue::Sparse(out))
            }
            _ => unreachable!("check() accepted mismatched representations"),
        }
    }

    pub fn scale(&self, lambda: f64, x: &VectorValue) -> Result<VectorValue> {
        self.check(x)?;
        Ok(match x {
            VectorValue::Dense(v) => VectorValue::Dense(v.iter().map(|a| lambda * a).collect()),
            VectorValue::Prefix(v) => VectorValue::Prefix(v.iter().map(|a| lambda * a).collect()),
            VectorValue::Sparse(m) => {
                let mut out = BTreeMap::new();
                for (k, v) in m {
                    let s = lambda * v;
                    if s != 0.0 {
                        out.insert(k.clone(), s);
                    }
                }
                VectorValue::Sparse(out)
            }
        })
    }

    /// In-place `acc += w * v`, coordinate-for-coordinate the same
    /// floating operations as `add(acc, scale(w, v))`. Callers that
    /// build sparse sums must [`Space::renormalize`] once at the end.
    pub fn axpy_into(&self, acc: &mut VectorValue, w: f64, v: &VectorValue) -> Result<()> {
        self.check(acc)?;
        self.check(v)?;
        match (acc, v) {
            (VectorValue::Dense(a), VectorValue::Dense(b))
            | (VectorValue::Prefix(a), VectorValue::Prefix(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += w * y;
                }
            }
            (VectorValue::Sparse(a), VectorValue::Sparse(b)) => {
                for (k, y) in b {
                    let t = w * y;
                    if t != 0.0 {
                        *a.entry(k.clone()).or_insert(0.0) += t;
                    }
                }
            }
            _ => unreachable!("check() accepted mismatched representations"),
        }
        Ok(())
    }

    /// Drops explicitly stored zeros from sparse values; no-op on the
    /// other representations.
    pub fn renormalize(&self, v: &mut VectorValue) {
        if let VectorValue::Sparse(m) = v {
            m.retain(|_, x| *x != 0.0);
        }
    }

    /// The invariant metric of the backend.
    pub fn metric(&self, x: &VectorValue, y: &VectorValue) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (&self.kind, x, y) {
            (SpaceKind::Euclidean { .. }, VectorValue::Dense(a), VectorValue::Dense(b)) => {
                let mut s = 0.0;
                for (u, v) in a.iter().zip(b) {
                    let d = u - v;
                    s += d * d;
                }
                s.sqrt()
            }
            (SpaceKind::OmegaSup { .. }, VectorValue::Prefix(a), VectorValue::Prefix(b)) => {
                let mut worst = 0.0f64;
                for (i, (u, v)) in a.iter().zip(b).enumerate() {
                    let d = (u - v).abs().min(1.0) / (i + 1) as f64;
                    worst = worst.max(d);
                }
                worst
            }
            (SpaceKind::OmegaSum { .. }, VectorValue::Prefix(a), VectorValue::Prefix(b)) => {
                let mut s = 0.0;
                let mut w = 0.5;
                for (u, v) in a.iter().zip(b) {
                    s += (u - v).abs().min(1.0) * w;
                    w *= 0.5;
                }
                s
            }
            (SpaceKind::Lp { p, .. }, VectorValue::Prefix(a), VectorValue::Prefix(b)) => {
                let mut s = 0.0;
                for (u, v) in a.iter().zip(b) {
                    s += (u - v).abs().powf(*p);
                }
                s.powf(1.0 / p)
            }
            (SpaceKind::LInf { .. }, VectorValue::Prefix(a), VectorValue::Prefix(b)) => {
                let mut worst = 0.0f64;
                for (u, v) in a.iter().zip(b) {
                    worst = worst.max((u - v).abs());
                }
                worst
            }
            (SpaceKind::L1Gamma, VectorValue::Sparse(a), VectorValue::Sparse(b)) => {
                // Two-pointer merge over the sorted label union; symmetric
                // and deterministic.
                let mut s = 0.0;
                let mut ia = a.iter().peekable();
                let mut ib = b.iter().peekable();
                loop {
                    match (ia.peek(), ib.peek()) {
                        (Some((ka, va)), Some((kb, vb))) => match ka.cmp(kb) {
                            std::cmp::Ordering::Less => {
                                s += va.abs();
                                ia.next();
                            }
                            std::cmp::Ordering::Greater => {
                                s += vb.abs();
                                ib.next();
                            }
                            std::cmp::Ordering::Equal => {
                                s += (*va - *vb).abs();
                                ia.next();
                                ib.next();
                            }
                        },
                        (Some((_, va)), None) => {
                            s += va.abs();
                            ia.next();
                        }
                        (None, Some((_, vb))) => {
                            s += vb.abs();
                            ib.next();
                        }
                        (None, None) => break,
                    }
                }
                s
            }
            _ => unreachable!(),
        })
    }

    /// `d(0, x)` convenience.
    pub fn norm(&self, x: &VectorValue) -> Result<f64> {
        self.metric(x, &self.zero())
    }

    /// Upper bound for `d(0, v)` over all `v` whose coordinates are
    /// bounded by `abs_bounds` in absolute value. Valid because all
    /// shipped metrics are monotone in coordinate-wise absolute
    /// differences.
    pub fn metric_of_abs_bounds(&self, abs_bounds: &[f64]) -> Result<f64> {
        let v = match self.kind {
            SpaceKind::Euclidean { dim } => {
                let mut b = abs_bounds.to_vec();
                b.resize(dim, 0.0);
                VectorValue::Dense(b)
            }
            SpaceKind::L1Gamma => {
                let mut m = BTreeMap::new();
                for (i, v) in abs_bounds.iter().enumerate() {
                    if *v != 0.0 {
                        m.insert((i + 1).to_string(), *v);
                    }
                }
                VectorValue::Sparse(m)
            }
            _ => {
                let prefix = self.prefix_len().unwrap();
                let mut b = abs_bounds.to_vec();
                b.resize(prefix, 0.0);
                VectorValue::Prefix(b)
            }
        };
        self.norm(&v)
    }

    /// Draws a sample vector with coordinates uniform in `[-2, 2]`;
    /// sparse samples use one to four small labels.
    pub fn sample_vector(&self, rng: &mut impl Rng) -> VectorValue {
        match self.kind {
            SpaceKind::Euclidean { dim } => {
                VectorValue::Dense((0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            }
            SpaceKind::L1Gamma => {
                let labels = ["a", "b", "c", "d", "e", "f", "g", "h"];
                let k = rng.gen_range(1..=4usize);
                let mut m = BTreeMap::new();
                for _ in 0..k {
                    let label = labels[rng.gen_range(0..labels.len())];
                    let v: f64 = rng.gen_range(-2.0..2.0);
                    if v != 0.0 {
                        m.insert(label.to_string(), v);
                    }
                }
                VectorValue::Sparse(m)
            }
            _ => {
                let prefix = self.prefix_len().unwrap();
                VectorValue::Prefix((0..prefix).map(|_| rng.gen_range(-2.0..2.0)).collect())
            }
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SpaceKind::Euclidean { dim } => write!(f, "euclidean:{dim}"),
            SpaceKind::OmegaSup { prefix } => write!(f, "omega-sup:{prefix}"),
            SpaceKind::OmegaSum { prefix } => write!(f, "omega-sum:{prefix}"),
            SpaceKind::Lp { p, prefix } => write!(f, "lp:{p}:{prefix}"),
            SpaceKind::LInf { prefix } => write!(f, "linf:{prefix}"),
            SpaceKind::L1Gamma => write!(f, "l1gamma"),
        }
    }
}

impl FromStr for Space {
    type Err = Error;

    /// Parses the space grammar: `euclidean:<n>`, `omega-sup:<M>`,
    /// `omega-sum:<M>`, `lp:<p>:<M>`, `linf:<M>`, `l1gamma`.
    fn from_str(s: &str) -> Result<Space> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let dim = |part: &str| -> Result<usize> {
            let n: usize = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension '{part}' in space '{s}'")))?;
            if n == 0 {
                return Err(Error::Parse(format!("zero dimension in space '{s}'")));
            }
            Ok(n)
        };
        match parts.as_slice() {
            ["euclidean", n] => Ok(Space::euclidean(dim(n)?)),
            ["omega-sup", m] => Ok(Space::omega_sup(dim(m)?)),
            ["omega-sum", m] => Ok(Space::omega_sum(dim(m)?)),
            ["lp", p, m] => {
                let p: f64 = p
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in space '{s}'")))?;
                Space::lp(p, dim(m)?)
            }
            ["linf", m] => Ok(Space::linf(dim(m)?)),
            ["l1gamma"] => Ok(Space::l1_gamma()),
            _ => Err(Error::Parse(format!("unknown space '{s}'"))),
        }
    }
}

/// Seeded sampling configuration for the metric probes.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(samples: usize, seed: u64) -> SamplerConfig {
        SamplerConfig { samples, seed }
    }
}

/// Witness of the worst case a metric probe observed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeWitness {
    pub x: VectorValue,
    pub y: VectorValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<VectorValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

/// Outcome of a sampled metric-property probe. Violations at or below
/// `tolerance` are treated as floating rounding and reported as zero;
/// a witness is present exactly when the violation is positive.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricProbeReport {
    pub space: String,
    pub property: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub worst_violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ProbeWitness>,
}

const PROBE_ROUNDING_TOL: f64 = 1e-12;

/// Samples triples `(x, y, z)` and reports the worst
/// `|d(x+z, y+z) - d(x, y)|`.
pub fn check_translation_invariance(space: &Space, cfg: SamplerConfig) -> MetricProbeReport {
    let deviations = exec::map_indexed(cfg.samples, |i| {
        let mut rng = exec::subrng(cfg.seed, i as u64);
        let x = space.sample_vector(&mut rng);
        let y = space.sample_vector(&mut rng);
        let z = space.sample_vector(&mut rng);
        let shifted = space
            .metric(&space.add(&x, &z).unwrap(), &space.add(&y, &z).unwrap())
            .unwrap();
        let base = space.metric(&x, &y).unwrap();
        ((shifted - base).abs(), x, y, z)
    });
    let mut worst = 0.0f64;
    let mut witness = None;
    for (dev, x, y, z) in deviations {
        if dev > worst {
            worst = dev;
            witness = Some(ProbeWitness { x, y, z: Some(z), lambda: None });
        }
    }
    let violation = if worst > PROBE_ROUNDING_TOL { worst } else { 0.0 };
    MetricProbeReport {
        space: space.to_string(),
        property: "translation-invariance".to_string(),
        samples: cfg.samples,
        seed: cfg.seed,
        tolerance: PROBE_ROUNDING_TOL,
        worst_violation: violation,
        witness: if violation > 0.0 { witness } else { None },
    }
}

/// Documented deterministic witnesses fed to the scaling probe along
/// with its random samples. For the product metrics, `x = 2 e_1`,
/// `y = 0`, `λ = 0.6` exhibits `d(λx, λy) = 1 > 0.6 = λ d(x, y)`.
pub fn scaling_witness_corpus(space: &Space) -> Vec<(VectorValue, VectorValue, f64)> {
    match space.kind() {
        SpaceKind::OmegaSup { .. } | SpaceKind::OmegaSum { .. } => {
            let two_e1 = space.scale(2.0, &space.basis(1).unwrap()).unwrap();
            vec![(two_e1, space.zero(), 0.6)]
        }
        _ => vec![],
    }
}

/// Samples pairs against a λ grid in `[0, 1)` and reports the worst
/// positive `d(λx, λy) - λ d(x, y)`, including the documented witness
/// corpus in the search.
pub fn check_scaling_inequality(
    space: &Space,
    cfg: SamplerConfig,
    lambdas: &[f64],
) -> Result<MetricProbeReport> {
    if lambdas.iter().any(|l| !(0.0..1.0).contains(l)) {
        return Err(Error::Domain("λ grid must lie in [0, 1)".into()));
    }
    let lambdas = lambdas.to_vec();
    let corpus = scaling_witness_corpus(space);
    let n_tasks = cfg.samples + corpus.len();
    let results = exec::map_indexed(n_tasks, |i| {
        let (x, y, fixed_lambda) = if i < corpus.len() {
            corpus[i].clone()
        } else {
            let mut rng = exec::subrng(cfg.seed, i as u64);
            let x = space.sample_vector(&mut rng);
            let y = space.sample_vector(&mut rng);
            (x, y, f64::NAN)
        };
        let base = space.metric(&x, &y).unwrap();
        let mut worst = f64::NEG_INFINITY;
        let mut at = 0.0;
        let grid: &[f64] = if fixed_lambda.is_nan() {
            &lambdas
        } else {
            std::slice::from_ref(&fixed_lambda)
        };
        for &l in grid {
            let scaled = space
                .metric(&space.scale(l, &x).unwrap(), &space.scale(l, &y).unwrap())
                .unwrap();
            let gap = scaled - l * base;
            if gap > worst {
                worst = gap;
                at = l;
            }
        }
        (worst, at, x, y)
    });
    let mut worst = 0.0f64;
    let mut witness = None;
    for (gap, lambda, x, y) in results {
        if gap > worst {
            worst = gap;
            witness = Some(ProbeWitness { x, y, z: None, lambda: Some(lambda) });
        }
    }
    let violation = if worst > PROBE_ROUNDING_TOL { worst } else { 0.0 };
    Ok(MetricProbeReport {
        space: space.to_string(),
        property: "scaling-inequality".to_string(),
        samples: cfg.samples,
        seed: cfg.seed,
        tolerance: PROBE_ROUNDING_TOL,
        worst_violation: violation,
        witness: if violation > 0.0 { witness } else { None },
    })
}

/// Default λ grid: 0.05 steps across [0.05, 0.95], which contains the
/// documented witness value 0.6 up to grid rounding.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}
