//! Shapes from decoration vectors, gluing equations, and volume.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::braid::Diagram;
use crate::decoration::{octahedron_vectors, Decoration};
use crate::error::{Error, Result};
use crate::linalg::{bloch_wigner, cr, det2, Vec2, C};
use crate::ptolemy::{edge_sign, edge_source, CrossingOctahedron, Src, TETS};
use crate::representation::WirtingerRep;

/// Orientation of each tetrahedron of a positive crossing (negated for
/// negative crossings), in the order of `TETS`.
pub const TET_ORIENTATION: [i8; 5] = [-1, 1, 1, -1, 1];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TetShape {
    pub crossing: usize,
    pub tet: [usize; 4],
    pub z: C,
    pub orientation: i8,
}

/// Cross-ratio [v0 v2][v1 v3] / ([v0 v3][v1 v2]).
pub fn tet_shape(v: [Vec2; 4]) -> Result<C> {
    for a in 0..4 {
        for b in a + 1..4 {
            if det2(v[a], v[b]).norm() <= 1e-12 * v[a].norm() * v[b].norm() {
                return Err(Error::DegenerateShape(format!("ideal points {a} and {b} coincide")));
            }
        }
    }
    Ok(det2(v[0], v[2]) * det2(v[1], v[3]) / (det2(v[0], v[3]) * det2(v[1], v[2])))
}

/// The same cross-ratio from Ptolemy coordinates, undoing the edge signs.
pub fn shape_from_ptolemy(o: &CrossingOctahedron, t: [usize; 4]) -> C {
    let d = |a: usize, b: usize| o.c(t[a], t[b]) * cr(edge_sign(t[a], t[b]) as f64);
    d(0, 2) * d(1, 3) / (d(0, 3) * d(1, 2))
}

pub fn all_shapes(d: &Diagram, rep: &WirtingerRep, dec: &Decoration) -> Result<Vec<TetShape>> {
    let mut out = Vec::with_capacity(5 * d.len());
    for (i, c) in d.crossings.iter().enumerate() {
        let v = octahedron_vectors(d, rep, dec, i);
        for (ti, t) in TETS.iter().enumerate() {
            let z = tet_shape(t.map(|j| v[j]))
                .map_err(|_| Error::DegenerateTetrahedron { crossing: i + 1, tet: *t })?;
            out.push(TetShape { crossing: i + 1, tet: *t, z, orientation: TET_ORIENTATION[ti] * c.sign });
        }
    }
    Ok(out)
}

pub fn volume(shapes: &[TetShape]) -> Result<f64> {
    shapes.iter().map(|s| Ok(s.orientation as f64 * bloch_wigner(s.z)?)).sum()
}

/// Shape parameter at the edge between tetrahedron positions a < b.
pub fn edge_shape(z: C, a: usize, b: usize) -> C {
    let one = cr(1.0);
    match (a, b) {
        (0, 1) | (2, 3) => z,
        (0, 2) | (1, 3) => one / (one - z),
        _ => one - one / z,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EdgeLabel {
    /// Slot (1-based) on level (1-based, level n+1 identified with 1).
    Level { level: usize, slot: usize },
    /// Added edge y1 or y2 of a crossing.
    Diagonal { crossing: usize, which: usize },
}

struct UnionFind(BTreeMap<EdgeLabel, EdgeLabel>);

impl UnionFind {
    fn find(&mut self, x: EdgeLabel) -> EdgeLabel {
        let mut r = x;
        while let Some(&p) = self.0.get(&r) {
            if p == r {
                break;
            }
            r = p;
        }
        self.0.insert(x, r);
        r
    }

    fn union(&mut self, a: EdgeLabel, b: EdgeLabel) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0.insert(ra, rb);
        }
    }
}

/// Octahedron edge (i, j) of crossing index `ci` (0-based) as a global label.
pub fn edge_label(d: &Diagram, ci: usize, i: usize, j: usize) -> EdgeLabel {
    let n = d.len();
    let c = &d.crossings[ci];
    let w = 3 * c.k - 2;
    match edge_source(c.sign, i, j) {
        Src::Above(s) => EdgeLabel::Level { level: ci + 1, slot: w + s - 1 },
        Src::Below(s) => EdgeLabel::Level { level: (ci + 1) % n + 1, slot: w + s - 1 },
        Src::Y(s) => EdgeLabel::Diagonal { crossing: ci + 1, which: s },
    }
}

/// Edge classes of the glued triangulation: returns the representative of
/// every edge label.
pub fn edge_classes(d: &Diagram) -> BTreeMap<EdgeLabel, EdgeLabel> {
    let n = d.len();
    let m = d.width();
    let lv = |i: usize, s: usize| EdgeLabel::Level { level: i % n + 1, slot: s };
    let mut uf = UnionFind(BTreeMap::new());
    for (i, c) in d.crossings.iter().enumerate() {
        let w = 3 * c.k - 2;
        for s in 1..=3 * m + 1 {
            if s <= w || s >= w + 6 {
                uf.union(lv(i, s), lv(i + 1, s));
            }
        }
        if c.sign > 0 {
            uf.union(lv(i + 1, w + 1), lv(i, w + 4));
            uf.union(lv(i + 1, w + 5), lv(i, w + 2));
        } else {
            uf.union(lv(i + 1, w + 2), lv(i, w + 5));
            uf.union(lv(i + 1, w + 4), lv(i, w + 1));
        }
        for which in [1, 2] {
            uf.find(EdgeLabel::Diagonal { crossing: i + 1, which });
        }
    }
    for i in 0..n {
        for s in 1..=3 * m + 1 {
            uf.find(lv(i, s));
        }
    }
    let keys: Vec<EdgeLabel> = uf.0.keys().copied().collect();
    keys.into_iter().map(|k| (k, uf.find(k))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeClassResidual {
    pub class: EdgeLabel,
    pub incidences: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingReport {
    pub classes: Vec<EdgeClassResidual>,
    pub max_residual: f64,
    pub pass: bool,
}

/// |prod z_e^{+-1} - 1| over the tetrahedra around each edge class.
pub fn gluing_residual(shapes: &[TetShape], d: &Diagram) -> GluingReport {
    let classes = edge_classes(d);
    let mut acc: BTreeMap<EdgeLabel, (C, usize)> = BTreeMap::new();
    for s in shapes {
        for a in 0..4 {
            for b in a + 1..4 {
                let label = edge_label(d, s.crossing - 1, s.tet[a], s.tet[b]);
                let rep = classes[&label];
                let ze = edge_shape(s.z, a, b);
                let e = acc.entry(rep).or_insert((cr(1.0), 0));
                e.0 *= if s.orientation > 0 { ze } else { ze.inv() };
                e.1 += 1;
            }
        }
    }
    let classes: Vec<EdgeClassResidual> = acc
        .into_iter()
        .map(|(class, (p, k))| EdgeClassResidual { class, incidences: k, residual: (p - 1.0).norm() })
        .collect();
    let max_residual = classes.iter().map(|c| c.residual).fold(0.0, f64::max);
    GluingReport { pass: max_residual <= 1e-8, classes, max_residual }
}
