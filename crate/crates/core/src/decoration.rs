//! From a representation to a solution: arc colorings H, region colorings
//! V, the apex vector W, and the determinant rules on every level slot.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::braid::{Diagram, Slot};
use crate::cluster::{check_nondegenerate, ClusterTuple};
use crate::error::{Error, Result};
use crate::linalg::{cr, det2, Mat2, Vec2, C};
use crate::ptolemy::braid_obstruction;
use crate::representation::{obstruction_class, WirtingerRep};

const CLOSE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoration {
    pub w: Vec2,
    /// `v[j-1]` decorates region j.
    pub v: Vec<Vec2>,
    /// `h[a-1]` decorates arc a.
    pub h: Vec<Vec2>,
    /// (alpha, beta, gamma) with V_1 = (alpha, beta), W = (gamma, 1), when built that way.
    pub params: Option<[C; 3]>,
}

/// The -1-eigendirection of a parabolic matrix, scaled so its larger entry is 1.
pub fn eigen_direction(g: &Mat2) -> Vec2 {
    let m = g.0;
    let u = Vec2::new(m[0][1], -(m[0][0] + 1.0));
    let v = Vec2::new(m[1][1] + 1.0, -m[1][0]);
    let e = if u.norm() >= v.norm() { u } else { v };
    let big = if e.0[0].norm() >= e.0[1].norm() { e.0[0] } else { e.0[1] };
    e.scale(big.inv())
}

/// Propagate H_out = rho(g_over)^e H_in along the knot from H_1 = seed.
pub fn arc_colorings(d: &Diagram, rep: &WirtingerRep, h_seed: Option<Vec2>) -> Result<Vec<Vec2>> {
    let seed = h_seed.unwrap_or_else(|| eigen_direction(rep.g(1)));
    if seed.is_zero() || rep.g(1).apply(seed).max_diff(seed.scale(cr(-1.0))) > CLOSE_TOL * seed.norm() {
        return Err(Error::InvalidRepresentation("H_1 is not a -1-eigenvector of g_1".into()));
    }
    let n = d.arcs.len();
    let mut h = vec![Vec2::real(0.0, 0.0); n];
    h[0] = seed;
    let mut closing = seed;
    for i in d.under_order() {
        let c = &d.crossings[i];
        let next = rep.g(c.over).pow_sign(c.sign).apply(h[c.under_in - 1]);
        if c.under_out == 1 {
            closing = next;
        } else {
            h[c.under_out - 1] = next;
        }
    }
    let s = seed.norm();
    if closing.max_diff(seed) > CLOSE_TOL * s {
        let braid = braid_obstruction(d.len());
        if closing.max_diff(seed.scale(cr(-1.0))) <= CLOSE_TOL * s {
            let rep_class = obstruction_class(d, rep).unwrap_or(-braid);
            return Err(Error::ObstructionMismatch { rep: rep_class, braid });
        }
        return Err(Error::InconsistentColoring { residual: closing.max_diff(seed) / s });
    }
    for (a, v) in h.iter().enumerate() {
        if rep.g(a + 1).apply(*v).max_diff(v.scale(cr(-1.0))) > CLOSE_TOL * v.norm().max(1.0) {
            return Err(Error::InconsistentColoring { residual: f64::NAN });
        }
    }
    Ok(h)
}

/// V_{right} = rho(g_a)^-1 V_{left} across every strand at every level, from V_1 = seed.
pub fn region_colorings(d: &Diagram, rep: &WirtingerRep, v_seed: Vec2) -> Result<Vec<Vec2>> {
    let nr = d.regions.len();
    let m = d.width();
    let mut v: Vec<Option<Vec2>> = vec![None; nr];
    v[0] = Some(v_seed);
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..=d.len() {
            for s in 0..m {
                let g = rep.g(d.arc_at[i][s]);
                let (l, r) = (d.region_at[i][s] - 1, d.region_at[i][s + 1] - 1);
                match (v[l], v[r]) {
                    (Some(x), None) => {
                        v[r] = Some(g.adj().apply(x));
                        changed = true;
                    }
                    (None, Some(x)) => {
                        v[l] = Some(g.apply(x));
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
    }
    let v: Vec<Vec2> = v.into_iter().map(|x| x.expect("regions are connected")).collect();
    let mut worst = 0.0f64;
    for i in 0..=d.len() {
        for s in 0..m {
            let g = rep.g(d.arc_at[i][s]);
            let (l, r) = (d.region_at[i][s] - 1, d.region_at[i][s + 1] - 1);
            worst = worst.max(g.adj().apply(v[l]).max_diff(v[r]) / v[r].norm().max(v[l].norm()).max(1e-300));
        }
    }
    if !(worst <= CLOSE_TOL) {
        return Err(Error::InconsistentColoring { residual: worst });
    }
    Ok(v)
}

/// V_1 = (alpha, beta), W = (gamma, 1).
pub fn decorate(d: &Diagram, rep: &WirtingerRep, params: [C; 3], h_seed: Option<Vec2>) -> Result<Decoration> {
    let [a, b, g] = params;
    let h = arc_colorings(d, rep, h_seed)?;
    let v = region_colorings(d, rep, Vec2::new(a, b))?;
    Ok(Decoration { w: Vec2::new(g, cr(1.0)), v, h, params: Some(params) })
}

pub fn assemble_solution(d: &Diagram, dec: &Decoration) -> Vec<ClusterTuple> {
    d.levels
        .iter()
        .map(|row| {
            ClusterTuple(
                row.iter()
                    .map(|slot| match *slot {
                        Slot::Region { region } => det2(dec.v[region - 1], dec.w),
                        Slot::Under { arc, region } => det2(dec.v[region - 1], dec.h[arc - 1]),
                        Slot::Over { arc } => det2(dec.h[arc - 1], dec.w),
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Decoration vectors on the six vertices of the octahedron at crossing i
/// (0-based): 0 and 1 on the knot (over / under strand), 2 and 3 at q, 4 and 5 at p.
pub fn octahedron_vectors(d: &Diagram, rep: &WirtingerRep, dec: &Decoration, i: usize) -> [Vec2; 6] {
    let c = &d.crossings[i];
    let (under, q) = if c.sign > 0 { (c.under_in, c.regions.top) } else { (c.under_out, c.regions.bottom) };
    [
        dec.h[c.over - 1],
        dec.h[under - 1],
        dec.v[c.regions.right - 1],
        dec.v[q - 1],
        rep.g(c.over).adj().apply(dec.w),
        dec.w,
    ]
}

/// Non-degenerate cluster solution and distinct ideal points at the ends of
/// every octahedron edge (vertices 0 and 1 are not joined by an edge).
pub fn is_generic(d: &Diagram, rep: &WirtingerRep, dec: &Decoration) -> bool {
    let tuples = assemble_solution(d, dec);
    if !check_nondegenerate(&tuples, Some(&d.braid)).pass {
        return false;
    }
    (0..d.len()).all(|i| {
        let o = octahedron_vectors(d, rep, dec, i);
        (0..6).all(|a| {
            (a + 1..6).all(|b| (a, b) == (0, 1) || det2(o[a], o[b]).norm() > 1e-8 * o[a].norm() * o[b].norm())
        })
    })
}

fn draw(rng: &mut ChaCha8Rng) -> C {
    loop {
        let z = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() > 0.05 {
            return z;
        }
    }
}

pub const GENERIC_RETRIES: usize = 100;

/// Seeded random (alpha, beta, gamma) and H_1 scale, redrawn until generic.
/// Returns the decoration and the number of draws used.
pub fn generic_decoration(d: &Diagram, rep: &WirtingerRep, seed: u64) -> Result<(Decoration, usize)> {
    let base = arc_colorings(d, rep, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=GENERIC_RETRIES {
        let params = [draw(&mut rng), draw(&mut rng), draw(&mut rng)];
        let t = draw(&mut rng);
        let dec = decorate(d, rep, params, Some(base[0].scale(t)))?;
        if is_generic(d, rep, &dec) {
            return Ok((dec, attempt));
        }
    }
    Err(Error::GenericityExhausted { retries: GENERIC_RETRIES })
}
