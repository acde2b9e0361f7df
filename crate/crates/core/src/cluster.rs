//! The cluster dynamics: R^{+-} on a 7-window, R_k on a level, evolution
//! along a braid word.

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::linalg::C;
use crate::DEGEN_TOL;

/// The 3m+1 values on one horizontal level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterTuple(pub Vec<C>);

impl ClusterTuple {
    pub fn width(&self) -> usize {
        (self.0.len().max(1) - 1) / 3
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(m: usize) -> Self {
        ClusterTuple(vec![C::new(1.0, 0.0); 3 * m + 1])
    }

    /// Window of strand k (1-based): slots 3k-2 ..= 3k+4.
    pub fn window(&self, k: usize) -> [C; 7] {
        let s = 3 * k - 3;
        self.0[s..s + 7].try_into().unwrap()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn scale_of(x: &[C]) -> f64 {
    x.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

fn require_nonzero(x: &[C; 7], idx: &[usize]) -> Result<()> {
    let s = scale_of(x);
    for &j in idx {
        if x[j - 1].norm() <= DEGEN_TOL * s {
            return Err(Error::DegenerateInput {
                what: format!("x{j} vanishes in an R-window"),
                level: None,
                slot: Some(j),
            });
        }
    }
    Ok(())
}

/// R^{+} (sign = +1) or R^{-} (sign = -1) on (x1..x7).
pub fn apply_r(sign: i8, x: &[C; 7]) -> Result<[C; 7]> {
    let [x1, x2, x3, x4, x5, x6, x7] = *x;
    if sign > 0 {
        require_nonzero(x, &[2, 4, 6])?;
        Ok([
            x1,
            x5,
            (x1 * x3 * x5 + x3 * x4 * x5 + x1 * x2 * x6) / (x2 * x4),
            (x1 * x3 * x4 * x5
                + x3 * x4 * x4 * x5
                + x1 * x3 * x5 * x7
                + x3 * x4 * x5 * x7
                + x1 * x2 * x6 * x7)
                / (x2 * x4 * x6),
            (x3 * x4 * x5 + x3 * x5 * x7 + x2 * x6 * x7) / (x4 * x6),
            x3,
            x7,
        ])
    } else {
        require_nonzero(x, &[3, 4, 5])?;
        Ok([
            x1,
            (x1 * x3 * x5 + x1 * x2 * x6 + x2 * x4 * x6) / (x3 * x4),
            x6,
            (x1 * x2 * x4 * x6
                + x2 * x4 * x4 * x6
                + x1 * x3 * x5 * x7
                + x1 * x2 * x6 * x7
                + x2 * x4 * x6 * x7)
                / (x3 * x4 * x5),
            x2,
            (x3 * x5 * x7 + x2 * x4 * x6 + x2 * x6 * x7) / (x4 * x5),
            x7,
        ])
    }
}

/// R^{sign}_k: replaces the window of strand k, leaves the rest.
pub fn apply_r_k(k: usize, sign: i8, x: &ClusterTuple) -> Result<ClusterTuple> {
    let m = x.width();
    if k < 1 || k >= m {
        return Err(Error::Index { k: k as i64, max: m.saturating_sub(1) });
    }
    let w = apply_r(sign, &x.window(k)).map_err(|e| match e {
        Error::DegenerateInput { what, slot, .. } => {
            Error::DegenerateInput { what, level: None, slot: slot.map(|j| 3 * k - 3 + j) }
        }
        e => e,
    })?;
    let mut out = x.clone();
    out.0[3 * k - 3..3 * k + 4].copy_from_slice(&w);
    Ok(out)
}

/// x^{i+1} = R^{e_i}_{k_i}(x^i); returns x^1 ..= x^{n+1}.
pub fn evolve(b: &BraidWord, x1: &ClusterTuple) -> Result<Vec<ClusterTuple>> {
    if x1.len() != 3 * b.width + 1 {
        return Err(Error::degenerate(format!(
            "tuple has {} entries, width {} needs {}",
            x1.len(),
            b.width,
            3 * b.width + 1
        )));
    }
    let mut out = vec![x1.clone()];
    for (i, l) in b.letters.iter().enumerate() {
        let next = apply_r_k(l.k, l.sign, &out[i]).map_err(|e| match e {
            Error::DegenerateInput { what, slot, .. } => {
                Error::DegenerateInput { what, level: Some(i + 1), slot }
            }
            e => e,
        })?;
        out.push(next);
    }
    Ok(out)
}

/// max_j |x^1_j - x^{n+1}_j| relative to the largest magnitude.
pub fn solution_residual(tuples: &[ClusterTuple]) -> f64 {
    let (Some(first), Some(last)) = (tuples.first(), tuples.last()) else {
        return 0.0;
    };
    let s = tuples.iter().map(|t| t.max_abs()).fold(f64::MIN_POSITIVE, f64::max);
    first.0.iter().zip(&last.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / s
}

pub fn is_solution(tuples: &[ClusterTuple], tol: f64) -> bool {
    solution_residual(tuples) <= tol
}

/// Values on the two added edges of an octahedron.
pub fn y_values(sign: i8, x: &[C; 7]) -> Result<(C, C)> {
    let [x1, x2, x3, x4, x5, x6, x7] = *x;
    if sign > 0 {
        require_nonzero(x, &[2, 6])?;
        Ok((x3 * (x1 + x4) / x2, x5 * (x4 + x7) / x6))
    } else {
        require_nonzero(x, &[5, 3])?;
        Ok((x6 * (x4 + x7) / x5, x2 * (x1 + x4) / x3))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub pass: bool,
    /// (level, slot), both 1-based, with x = 0.
    pub zero_entries: Vec<(usize, usize)>,
    /// (level, j) with x_{3j-2} = -x_{3j+1}.
    pub opposite_pairs: Vec<(usize, usize)>,
    /// (crossing, which) with a vanishing y-value; only filled when a braid is given.
    pub zero_y: Vec<(usize, usize)>,
}

/// The level-wise non-degeneracy conditions, plus the y-values at each
/// crossing when the braid is supplied.
pub fn check_nondegenerate(tuples: &[ClusterTuple], braid: Option<&BraidWord>) -> NondegeneracyReport {
    let s = tuples.iter().map(|t| t.max_abs()).fold(f64::MIN_POSITIVE, f64::max);
    let tol = DEGEN_TOL * s;
    let mut r = NondegeneracyReport::default();
    for (i, t) in tuples.iter().enumerate() {
        for (j, x) in t.0.iter().enumerate() {
            if x.norm() <= tol {
                r.zero_entries.push((i + 1, j + 1));
            }
        }
        for j in 1..=t.width() {
            if (t.0[3 * j - 3] + t.0[3 * j]).norm() <= tol {
                r.opposite_pairs.push((i + 1, j));
            }
        }
    }
    if let Some(b) = braid {
        for (i, l) in b.letters.iter().enumerate() {
            let Some(t) = tuples.get(i) else { break };
            match y_values(l.sign, &t.window(l.k)) {
                Ok((y1, y2)) => {
                    let ys = tol.max(DEGEN_TOL * y1.norm().max(y2.norm()));
                    if y1.norm() <= ys {
                        r.zero_y.push((i + 1, 1));
                    }
                    if y2.norm() <= ys {
                        r.zero_y.push((i + 1, 2));
                    }
                }
                Err(_) => {
                    r.zero_y.push((i + 1, 1));
                    r.zero_y.push((i + 1, 2));
                }
            }
        }
    }
    r.pass = r.zero_entries.is_empty() && r.opposite_pairs.is_empty() && r.zero_y.is_empty();
    r
}
