//! Wirtinger representations (stored as the lift with all generator traces
//! -2), relation checks, the obstruction class, and a Newton solver for
//! boundary-parabolic representations.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::braid::{longitude_word, wirtinger_presentation, Diagram, Word};
use crate::error::{Error, Result};
use crate::linalg::{cr, Mat2, C};
use crate::TOL;

#[derive(Clone, Debug, PartialEq)]
pub struct WirtingerRep {
    /// `matrices[a-1]` is the image of arc generator g_a.
    pub matrices: Vec<Mat2>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub attempt: usize,
    pub residual: f64,
}

impl WirtingerRep {
    /// Checks det = 1, trace = -2 and M != -Id for every generator.
    pub fn new(matrices: Vec<Mat2>) -> Result<Self> {
        for (i, m) in matrices.iter().enumerate() {
            let s = m.norm().max(1.0);
            if (m.det() - 1.0).norm() > TOL * s * s {
                return Err(Error::InvalidRepresentation(format!("det of g{} is {}", i + 1, m.det())));
            }
            if (m.trace() + 2.0).norm() > TOL * s {
                return Err(Error::InvalidRepresentation(format!(
                    "trace of g{} is {}, expected -2",
                    i + 1,
                    m.trace()
                )));
            }
            if m.max_diff(&-Mat2::identity()) <= TOL {
                return Err(Error::InvalidRepresentation(format!("g{} is -Id", i + 1)));
            }
        }
        Ok(WirtingerRep { matrices })
    }

    /// No invariant checks; for deliberately broken inputs.
    pub fn unchecked(matrices: Vec<Mat2>) -> Self {
        WirtingerRep { matrices }
    }

    pub fn g(&self, arc: usize) -> &Mat2 {
        &self.matrices[arc - 1]
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// x g x^-1 on every generator.
    pub fn conjugate(&self, x: &Mat2) -> Result<Self> {
        let xi = x.inv()?;
        Ok(WirtingerRep { matrices: self.matrices.iter().map(|g| *x * *g * xi).collect() })
    }

    /// Entrywise complex conjugate (the conjugate representation).
    pub fn complex_conjugate(&self) -> Self {
        WirtingerRep { matrices: self.matrices.iter().map(|g| g.conj()).collect() }
    }

    /// The other lift: every generator negated (traces +2).
    pub fn other_lift(&self) -> Vec<Mat2> {
        self.matrices.iter().map(|g| -*g).collect()
    }

    pub fn to_json(&self, provenance: Option<&Provenance>) -> Value {
        let mut obj = Map::new();
        for (i, m) in self.matrices.iter().enumerate() {
            obj.insert((i + 1).to_string(), serde_json::to_value(m).expect("matrix serializes"));
        }
        if let Some(p) = provenance {
            obj.insert("provenance".into(), serde_json::to_value(p).expect("provenance serializes"));
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Json("representation must be an object".into()))?;
        let mut by_arc = BTreeMap::new();
        for (k, val) in obj {
            if k == "provenance" {
                continue;
            }
            let a: usize = k.parse().map_err(|_| Error::Json(format!("bad arc id '{k}'")))?;
            by_arc.insert(a, serde_json::from_value::<Mat2>(val.clone())?);
        }
        if by_arc.keys().copied().ne(1..=by_arc.len()) {
            return Err(Error::Json("arc ids must be 1..n".into()));
        }
        WirtingerRep::new(by_arc.into_values().collect())
    }
}

/// Ordered product; inverse letters use the adjugate (det-1 matrices).
pub fn evaluate_word(mats: &[Mat2], w: &Word) -> Mat2 {
    w.iter().fold(Mat2::identity(), |acc, &(g, e)| acc * mats[g - 1].pow_sign(e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub crossing: usize,
    /// Whether the relator is closer to +Id or -Id.
    pub sign: i8,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relations: Vec<RelationCheck>,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn verify_relations(d: &Diagram, rep: &WirtingerRep) -> RelationReport {
    let p = wirtinger_presentation(d);
    let relations: Vec<RelationCheck> = p
        .relations
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let (residual, sign) = evaluate_word(&rep.matrices, w).dist_pm_identity();
            RelationCheck { crossing: i + 1, sign, residual }
        })
        .collect();
    let max_residual = relations.iter().map(|r| r.residual).fold(0.0, f64::max);
    RelationReport { pass: max_residual <= TOL, relations, max_residual }
}

/// Trace of the image of the null-homologous longitude.
pub fn longitude_trace(d: &Diagram, mats: &[Mat2]) -> C {
    evaluate_word(mats, &longitude_word(d).1).trace()
}

/// tr(rho(lambda))/2, which must be +-1 for a boundary-parabolic lift.
pub fn obstruction_class(d: &Diagram, rep: &WirtingerRep) -> Result<i8> {
    let t = longitude_trace(d, &rep.matrices);
    if (t - 2.0).norm() <= 1e-6 {
        Ok(1)
    } else if (t + 2.0).norm() <= 1e-6 {
        Ok(-1)
    } else {
        Err(Error::NotParabolicOnBoundary { trace: format!("{t}") })
    }
}

/// tr(g_i g_j) for i < j, then tr(g_i g_j g_k) for i < j < k.
pub fn trace_invariants(mats: &[Mat2]) -> Vec<C> {
    let n = mats.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((mats[i] * mats[j]).trace());
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push((mats[i] * mats[j] * mats[k]).trace());
            }
        }
    }
    out
}

/// Conjugation-equivalence heuristic via trace invariants (complete for
/// irreducible representations).
pub fn equivalent(a: &WirtingerRep, b: &WirtingerRep, tol: f64) -> bool {
    a.len() == b.len()
        && trace_invariants(&a.matrices)
            .iter()
            .zip(trace_invariants(&b.matrices))
            .all(|(x, y)| (x - y).norm() <= tol * x.norm().max(1.0))
}

pub fn is_abelian(mats: &[Mat2], tol: f64) -> bool {
    let n = mats.len();
    (0..n).all(|i| (i + 1..n).all(|j| ((mats[i] * mats[j]).trace() - 2.0).norm() <= tol))
}

// ---- solver ------------------------------------------------------------

fn param(a: C, b: C) -> Mat2 {
    Mat2::new(-cr(1.0) - a * b, a * a, -b * b, -cr(1.0) + a * b)
}

fn d_param_a(a: C, b: C) -> Mat2 {
    Mat2::new(-b, a * 2.0, cr(0.0), b)
}

fn d_param_b(a: C, b: C) -> Mat2 {
    Mat2::new(-a, cr(0.0), -b * 2.0, a)
}

struct Problem<'a> {
    d: &'a Diagram,
    n: usize,
}

impl Problem<'_> {
    fn ab(&self, z: &DVector<C>, j: usize) -> (C, C) {
        if j == 1 {
            (cr(1.0), cr(0.0))
        } else {
            (z[j - 2], z[self.n - 1 + j - 2])
        }
    }

    fn mats(&self, z: &DVector<C>) -> Vec<Mat2> {
        (1..=self.n).map(|j| {
            let (a, b) = self.ab(z, j);
            param(a, b)
        })
        .collect()
    }

    fn residual(&self, g: &[Mat2]) -> DVector<C> {
        let mut r = DVector::from_element(4 * self.n, cr(0.0));
        for (i, c) in self.d.crossings.iter().enumerate() {
            let p = g[c.over - 1].pow_sign(c.sign);
            let e = g[c.under_out - 1] * p - p * g[c.under_in - 1];
            for (t, v) in e.0.iter().flatten().enumerate() {
                r[4 * i + t] = *v;
            }
        }
        r
    }

    fn jacobian(&self, z: &DVector<C>, g: &[Mat2]) -> DMatrix<C> {
        let nu = 2 * (self.n - 1);
        let mut jac = DMatrix::from_element(4 * self.n, nu, cr(0.0));
        for col in 0..nu {
            let (j, wrt_a) = if col < self.n - 1 { (col + 2, true) } else { (col - (self.n - 1) + 2, false) };
            let (a, b) = self.ab(z, j);
            let dg = if wrt_a { d_param_a(a, b) } else { d_param_b(a, b) };
            let dmat = |x: usize| if x == j { dg } else { Mat2::zero() };
            for (i, c) in self.d.crossings.iter().enumerate() {
                let p = g[c.over - 1].pow_sign(c.sign);
                let dp = if c.sign > 0 { dmat(c.over) } else { dmat(c.over).adj() };
                let de = dmat(c.under_out) * p + g[c.under_out - 1] * dp
                    - dp * g[c.under_in - 1]
                    - p * dmat(c.under_in);
                for (t, v) in de.0.iter().flatten().enumerate() {
                    jac[(4 * i + t, col)] = *v;
                }
            }
        }
        jac
    }
}

fn max_abs(v: &DVector<C>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolvedRep {
    pub rep: WirtingerRep,
    pub provenance: Provenance,
}

/// Gauss–Newton from seeded random starts on the trace -2 parametrization,
/// gauge fixed by g_1 = [[-1,1],[0,-1]]. Returns the distinct non-abelian
/// solutions found, in discovery order.
pub fn solve_parabolic(d: &Diagram, seed: u64, attempts: usize) -> Result<Vec<SolvedRep>> {
    let n = d.arcs.len();
    let prob = Problem { d, n };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<SolvedRep> = Vec::new();
    let nu = 2 * (n - 1);
    for attempt in 0..attempts {
        let mut z = DVector::from_fn(nu, |_, _| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let mut g = prob.mats(&z);
        let mut r = prob.residual(&g);
        let mut res = max_abs(&r);
        for _ in 0..200 {
            if res < 1e-14 || nu == 0 {
                break;
            }
            let jac = prob.jacobian(&z, &g);
            let svd = jac.svd(true, true);
            let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
            let Ok(pinv) = svd.pseudo_inverse(smax * 1e-12) else { break };
            let step = -(pinv * &r);
            let mut t = 1.0;
            let mut improved = false;
            while t > 1e-8 {
                let zt = &z + step.map(|s| s * t);
                let gt = prob.mats(&zt);
                let rt = prob.residual(&gt);
                let rest = max_abs(&rt);
                if rest.is_finite() && rest < res {
                    z = zt;
                    g = gt;
                    r = rt;
                    res = rest;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        let scale = g.iter().map(|m| m.norm()).fold(1.0, f64::max);
        if !(res <= 1e-10 && scale < 1e6) || is_abelian(&g, 1e-6) {
            continue;
        }
        let Ok(rep) = WirtingerRep::new(g) else { continue };
        let dup = found.iter().any(|f| {
            let a = trace_invariants(&f.rep.matrices);
            let b = trace_invariants(&rep.matrices);
            a.iter().zip(&b).all(|(x, y)| (x - y).norm() <= 1e-6 * x.norm().max(1.0))
        });
        if !dup {
            found.push(SolvedRep { rep, provenance: Provenance { seed, attempt, residual: res } });
        }
    }
    if found.is_empty() {
        Err(Error::NoSolutionFound { attempts })
    } else {
        Ok(found)
    }
}
