//! Ptolemy assignments on the octahedral decomposition (one octahedron per
//! crossing, five tetrahedra each), signed Ptolemy relations, the cocycle
//! matrices Phi_c and their lift, and meridian holonomy.
//!
//! Octahedron vertices: 0 = knot point on the over strand, 1 = knot point on
//! the under strand, 2 and 3 = lifts of q, 4 and 5 = lifts of p. Edges 23
//! and 45 are the interior diagonals carrying y2 and y1.

use serde::{Deserialize, Serialize};

use crate::braid::Diagram;
use crate::cluster::{y_values, ClusterTuple};
use crate::decoration::{octahedron_vectors, Decoration};
use crate::error::{Error, Result};
use crate::linalg::{cr, det2, Mat2, C};
use crate::representation::{trace_invariants, WirtingerRep};
use crate::{DEGEN_TOL, TOL};

pub const TETS: [[usize; 4]; 5] = [[0, 3, 4, 5], [0, 2, 4, 5], [2, 3, 4, 5], [1, 2, 3, 5], [1, 2, 3, 4]];

/// Where an octahedron edge takes its value: slot j of the crossing's window
/// on the level above or below, or one of the two added edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Src {
    Above(usize),
    Below(usize),
    Y(usize),
}
use Src::{Above as A, Below as B, Y};

pub fn edge_source(sign: i8, i: usize, j: usize) -> Src {
    let table = if sign > 0 { &POS_EDGES } else { &NEG_EDGES };
    let key = (i.min(j), i.max(j));
    table.iter().find(|(e, _)| *e == key).expect("octahedron edge").1
}

/// Edge (i<j) of the octahedron -> cluster value, positive crossing.
const POS_EDGES: [((usize, usize), Src); 14] = [
    ((0, 2), B(5)),
    ((0, 3), A(2)),
    ((0, 4), B(6)),
    ((0, 5), A(3)),
    ((1, 2), B(2)),
    ((1, 3), A(5)),
    ((1, 4), B(3)),
    ((1, 5), A(6)),
    ((2, 3), Y(2)),
    ((2, 4), B(4)),
    ((2, 5), A(7)),
    ((3, 4), A(1)),
    ((3, 5), A(4)),
    ((4, 5), Y(1)),
];

const NEG_EDGES: [((usize, usize), Src); 14] = [
    ((0, 2), A(5)),
    ((0, 3), B(2)),
    ((0, 4), B(3)),
    ((0, 5), A(6)),
    ((1, 2), A(2)),
    ((1, 3), B(5)),
    ((1, 4), A(3)),
    ((1, 5), B(6)),
    ((2, 3), Y(2)),
    ((2, 4), A(4)),
    ((2, 5), A(7)),
    ((3, 4), A(1)),
    ((3, 5), B(4)),
    ((4, 5), Y(1)),
];

/// c_ij = s_ij det(D_i, D_j) for the decoration vectors D of the octahedron.
pub fn edge_sign(i: usize, j: usize) -> i8 {
    match (i.min(j), i.max(j)) {
        (0, 2) | (0, 3) | (0, 4) | (1, 2) => -1,
        _ => 1,
    }
}

/// Obstruction sign on a face: the product of edge signs around it.
pub fn face_sigma(a: usize, b: usize, c: usize) -> i8 {
    edge_sign(a, b) * edge_sign(b, c) * edge_sign(a, c)
}

/// Boundary cocycle on the corner of vertex k toward vertex j: nontrivial
/// only at the knot vertices.
fn tau(k: usize, j: usize) -> i8 {
    if k <= 1 {
        edge_sign(k, j)
    } else {
        1
    }
}

/// Sign of the short edge s^k_ij under the braid boundary cocycle.
pub fn eps_short(k: usize, i: usize, j: usize) -> i8 {
    tau(k, i) * tau(k, j)
}

pub fn braid_obstruction(n: usize) -> i8 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingOctahedron {
    /// 1-based crossing index.
    pub crossing: usize,
    pub k: usize,
    pub sign: i8,
    pub above: [C; 7],
    pub below: [C; 7],
    pub y: [C; 2],
}

impl CrossingOctahedron {
    fn value(&self, s: Src) -> C {
        match s {
            A(j) => self.above[j - 1],
            B(j) => self.below[j - 1],
            Y(j) => self.y[j - 1],
        }
    }

    /// c on the oriented long edge i -> j, with c(j -> i) = -c(i -> j).
    pub fn c(&self, i: usize, j: usize) -> C {
        let v = self.value(edge_source(self.sign, i, j));
        if i < j {
            v
        } else {
            -v
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), C)> + '_ {
        let table = if self.sign > 0 { &POS_EDGES } else { &NEG_EDGES };
        table.iter().map(move |(e, s)| (*e, self.value(*s)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtolemyAssignment {
    pub crossings: Vec<CrossingOctahedron>,
    /// Class of the obstruction cocycle, (-1)^n.
    pub sigma: i8,
}

/// Read each crossing's window above and below, add (y1, y2).
pub fn extend_assignment(d: &Diagram, tuples: &[ClusterTuple]) -> Result<PtolemyAssignment> {
    if tuples.len() != d.len() + 1 {
        return Err(Error::degenerate(format!("need {} levels, got {}", d.len() + 1, tuples.len())));
    }
    let scale = tuples.iter().map(|t| t.max_abs()).fold(1.0, f64::max);
    let mut crossings = Vec::with_capacity(d.len());
    for (i, c) in d.crossings.iter().enumerate() {
        let above = tuples[i].window(c.k);
        let below = tuples[i + 1].window(c.k);
        let (y1, y2) = y_values(c.sign, &above).map_err(|e| match e {
            Error::DegenerateInput { what, slot, .. } => {
                Error::DegenerateInput { what, level: Some(i + 1), slot: slot.map(|j| 3 * c.k - 3 + j) }
            }
            e => e,
        })?;
        let o = CrossingOctahedron { crossing: i + 1, k: c.k, sign: c.sign, above, below, y: [y1, y2] };
        if let Some(((a, b), _)) = o.edges().find(|(_, v)| v.norm() <= DEGEN_TOL * scale) {
            return Err(Error::DegenerateInput {
                what: format!("c vanishes on edge {a}{b} of crossing {}", i + 1),
                level: Some(i + 1),
                slot: None,
            });
        }
        crossings.push(o);
    }
    Ok(PtolemyAssignment { crossings, sigma: braid_obstruction(d.len()) })
}

fn rel_residual(lhs: C, t1: C, t2: C) -> f64 {
    (lhs - t1 - t2).norm() / lhs.norm().max(t1.norm()).max(t2.norm()).max(f64::MIN_POSITIVE)
}

/// The five relations of a crossing in explicit x/y form, in the order of
/// the tetrahedra that produce them.
pub fn literal_relations(o: &CrossingOctahedron) -> [(C, C, C); 5] {
    let x = |j: usize| o.above[j - 1];
    let t = |j: usize| o.below[j - 1];
    let [y1, y2] = o.y;
    if o.sign > 0 {
        [
            (x(2) * y1, x(3) * x(4), x(1) * x(3)),
            (x(6) * y2, x(5) * x(7), x(4) * x(5)),
            (x(4) * t(4), x(1) * x(7), y1 * y2),
            (t(5) * y1, x(3) * t(4), x(3) * x(7)),
            (t(3) * y2, x(5) * t(4), x(1) * x(5)),
        ]
    } else {
        [
            (y1 * x(5), x(4) * x(6), x(6) * x(7)),
            (x(3) * y2, x(1) * x(2), x(2) * x(4)),
            (x(4) * t(4), y1 * y2, x(1) * x(7)),
            (t(2) * y1, x(6) * t(4), x(1) * x(6)),
            (t(6) * y2, x(2) * x(7), x(2) * t(4)),
        ]
    }
}

/// sigma_c c_ac c_bd = sigma_d c_ad c_bc + sigma_b c_ab c_cd for the tetrahedron
/// a<b<c<d, sigma_v being the obstruction sign of the face opposite v.
pub fn tet_relation(o: &CrossingOctahedron, t: [usize; 4]) -> (C, C, C) {
    let [a, b, c, d] = t;
    let s = |v: i8| cr(v as f64);
    (
        s(face_sigma(a, b, d)) * o.c(a, c) * o.c(b, d),
        s(face_sigma(a, b, c)) * o.c(a, d) * o.c(b, c),
        s(face_sigma(a, c, d)) * o.c(a, b) * o.c(c, d),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingResiduals {
    pub crossing: usize,
    pub sign: i8,
    pub literal: [f64; 5],
    pub tetrahedra: [f64; 5],
    /// x1 = x~1, x7 = x~7 and the crossing's slot permutation.
    pub slot_identities: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtolemyReport {
    pub crossings: Vec<CrossingResiduals>,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn verify_crossing_relations(a: &PtolemyAssignment) -> PtolemyReport {
    let crossings: Vec<CrossingResiduals> = a
        .crossings
        .iter()
        .map(|o| {
            let literal = literal_relations(o).map(|(l, t1, t2)| rel_residual(l, t1, t2));
            let tetrahedra = TETS.map(|t| {
                let (l, t1, t2) = tet_relation(o, t);
                rel_residual(l, t1, t2)
            });
            let pairs: [(usize, usize); 4] = if o.sign > 0 { [(1, 1), (7, 7), (5, 2), (3, 6)] } else { [(1, 1), (7, 7), (6, 3), (2, 5)] };
            let slot_identities = pairs
                .iter()
                .map(|&(i, j)| crate::linalg::rel_err(o.above[i - 1], o.below[j - 1]))
                .fold(0.0, f64::max);
            CrossingResiduals { crossing: o.crossing, sign: o.sign, literal, tetrahedra, slot_identities }
        })
        .collect();
    let max_residual = crossings
        .iter()
        .flat_map(|c| c.literal.iter().chain(&c.tetrahedra).chain([&c.slot_identities]))
        .copied()
        .fold(0.0, f64::max);
    PtolemyReport { pass: max_residual <= TOL, crossings, max_residual }
}

/// Solve the five relations of a crossing for (x~, y) given x.
pub fn solve_relations(sign: i8, x: &[C; 7]) -> Result<([C; 7], [C; 2])> {
    let s = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let nz = |v: C, what: &str| {
        if v.norm() <= DEGEN_TOL * s {
            Err(Error::degenerate(format!("{what} vanishes")))
        } else {
            Ok(v)
        }
    };
    let [x1, x2, x3, x4, x5, x6, x7] = *x;
    if sign > 0 {
        let y1 = (x3 * x4 + x1 * x3) / nz(x2, "x2")?;
        let y2 = (x5 * x7 + x4 * x5) / nz(x6, "x6")?;
        let t4 = (x1 * x7 + y1 * y2) / nz(x4, "x4")?;
        let t5 = (x3 * t4 + x3 * x7) / nz(y1, "y1")?;
        let t3 = (x5 * t4 + x1 * x5) / nz(y2, "y2")?;
        Ok(([x1, x5, t3, t4, t5, x3, x7], [y1, y2]))
    } else {
        let y1 = (x4 * x6 + x6 * x7) / nz(x5, "x5")?;
        let y2 = (x1 * x2 + x2 * x4) / nz(x3, "x3")?;
        let t4 = (y1 * y2 + x1 * x7) / nz(x4, "x4")?;
        let t2 = (x6 * t4 + x1 * x6) / nz(y1, "y1")?;
        let t6 = (x2 * x7 + x2 * t4) / nz(y2, "y2")?;
        Ok(([x1, t2, x6, t4, x2, t6, x7], [y1, y2]))
    }
}

// ---- cocycle ---------------------------------------------------------------

pub fn long_matrix(c: C) -> Mat2 {
    Mat2::new(cr(0.0), -c.inv(), c, cr(0.0))
}

/// Phi on the short edge s^k_ij (corner of vertex k, from the side toward i
/// to the side toward j) in the face {i, j, k}.
pub fn short_matrix(o: &CrossingOctahedron, k: usize, i: usize, j: usize) -> Mat2 {
    let sigma = face_sigma(i, j, k) as f64;
    let x = -o.c(j, i) * sigma / (o.c(i, k) * o.c(k, j));
    Mat2::new(cr(1.0), x, cr(0.0), cr(1.0))
}

/// Phi lifted by the braid boundary cocycle.
pub fn lifted_short_matrix(o: &CrossingOctahedron, k: usize, i: usize, j: usize) -> Mat2 {
    short_matrix(o, k, i, j).scale(cr(eps_short(k, i, j) as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeMatrix {
    pub crossing: usize,
    /// (i, j) for a long edge; (k, i, j) flattened as [k, i, j] for a short edge.
    pub edge: Vec<usize>,
    pub matrix: Mat2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleMatrices {
    pub long: Vec<EdgeMatrix>,
    pub short: Vec<EdgeMatrix>,
}

fn corners() -> Vec<(usize, usize, usize)> {
    // every (k, i, j) with {i, j, k} a face of one of the tetrahedra
    let mut out = Vec::new();
    for t in TETS {
        for k in t {
            let o: Vec<usize> = t.iter().copied().filter(|&v| v != k).collect();
            for (i, j) in [(o[0], o[1]), (o[1], o[2]), (o[2], o[0])] {
                for e in [(k, i, j), (k, j, i)] {
                    if !out.contains(&e) {
                        out.push(e);
                    }
                }
            }
        }
    }
    out
}

fn cocycle_with(a: &PtolemyAssignment, lifted: bool) -> CocycleMatrices {
    let mut long = Vec::new();
    let mut short = Vec::new();
    let cs = corners();
    for o in &a.crossings {
        for ((i, j), v) in o.edges() {
            long.push(EdgeMatrix { crossing: o.crossing, edge: vec![i, j], matrix: long_matrix(v) });
        }
        for &(k, i, j) in &cs {
            let m = if lifted { lifted_short_matrix(o, k, i, j) } else { short_matrix(o, k, i, j) };
            short.push(EdgeMatrix { crossing: o.crossing, edge: vec![k, i, j], matrix: m });
        }
    }
    CocycleMatrices { long, short }
}

pub fn cocycle_matrices(a: &PtolemyAssignment) -> CocycleMatrices {
    cocycle_with(a, false)
}

pub fn lift_cocycle(a: &PtolemyAssignment) -> CocycleMatrices {
    cocycle_with(a, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleCheck {
    pub crossing: usize,
    pub tet: [usize; 4],
    pub vertex: usize,
    pub sign: i8,
    pub residual: f64,
}

/// Products of the three short edges around each truncation triangle.
pub fn triangle_products(a: &PtolemyAssignment, lifted: bool) -> Vec<TriangleCheck> {
    let mut out = Vec::new();
    for o in &a.crossings {
        for t in TETS {
            for k in t {
                let v: Vec<usize> = t.iter().copied().filter(|&x| x != k).collect();
                let f = |i, j| if lifted { lifted_short_matrix(o, k, i, j) } else { short_matrix(o, k, i, j) };
                let p = f(v[0], v[1]) * f(v[1], v[2]) * f(v[2], v[0]);
                let (residual, sign) = p.dist_pm_identity();
                out.push(TriangleCheck { crossing: o.crossing, tet: t, vertex: k, sign, residual });
            }
        }
    }
    out
}

/// A path of short edges on the boundary torus inside one crossing:
/// the product of lifted matrices along `edges` (each (k, i, j)).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPath {
    pub crossing: usize,
    pub arc: Option<usize>,
    pub vertex: usize,
    pub edges: Vec<[usize; 3]>,
}

impl BoundaryPath {
    pub fn product(&self, a: &PtolemyAssignment) -> Mat2 {
        let o = &a.crossings[self.crossing - 1];
        self.edges
            .iter()
            .fold(Mat2::identity(), |acc, &[k, i, j]| acc * lifted_short_matrix(o, k, i, j))
    }

    pub fn eps(&self) -> i8 {
        self.edges.iter().map(|&[k, i, j]| eps_short(k, i, j)).product()
    }
}

/// Meridian loops recorded per crossing: around the over strand at vertex 0
/// and around the under strand at vertex 1.
pub fn meridian_paths(d: &Diagram) -> Vec<BoundaryPath> {
    let mut out = Vec::new();
    for (i, c) in d.crossings.iter().enumerate() {
        out.push(BoundaryPath { crossing: i + 1, arc: Some(c.over), vertex: 0, edges: vec![[0, 4, 3], [0, 3, 5]] });
        let under = if c.sign > 0 { c.under_in } else { c.under_out };
        out.push(BoundaryPath { crossing: i + 1, arc: Some(under), vertex: 1, edges: vec![[1, 2, 5], [1, 5, 3]] });
    }
    out
}

/// The piece of the blackboard longitude passing under each crossing.
pub fn longitude_paths(d: &Diagram) -> Vec<BoundaryPath> {
    d.crossings
        .iter()
        .enumerate()
        .map(|(i, c)| BoundaryPath {
            crossing: i + 1,
            arc: None,
            vertex: 1,
            edges: if c.sign > 0 { vec![[1, 5, 3], [1, 3, 4]] } else { vec![[1, 4, 3], [1, 3, 5]] },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub crossing: usize,
    pub kind: String,
    pub diagonal: [C; 2],
    pub expected: i8,
    pub lower_left: f64,
}

/// Lifted boundary composites: upper triangular with diagonal eps (meridians
/// -1, longitude pieces +1).
pub fn boundary_checks(a: &PtolemyAssignment, d: &Diagram) -> Vec<BoundaryCheck> {
    let mut out = Vec::new();
    for (kind, paths) in [("meridian", meridian_paths(d)), ("longitude", longitude_paths(d))] {
        for p in paths {
            let m = p.product(a);
            out.push(BoundaryCheck {
                crossing: p.crossing,
                kind: kind.into(),
                diagonal: [m.0[0][0], m.0[1][1]],
                expected: p.eps(),
                lower_left: m.0[1][0].norm(),
            });
        }
    }
    out
}

/// Local holonomy of the first recorded meridian around `arc`.
pub fn meridian_holonomy(a: &PtolemyAssignment, d: &Diagram, arc: usize) -> Result<(BoundaryPath, Mat2)> {
    let p = meridian_paths(d)
        .into_iter()
        .find(|p| p.arc == Some(arc))
        .ok_or(Error::PathNotRecorded { arc })?;
    let m = p.product(a);
    Ok((p, m))
}

/// Change of frame from the Ptolemy corner frame to the decoration frame.
pub fn meridian_frame(d: &Diagram, rep: &WirtingerRep, dec: &Decoration, p: &BoundaryPath) -> Result<Mat2> {
    let v = octahedron_vectors(d, rep, dec, p.crossing - 1);
    let (a, b) = if p.vertex == 0 { (v[0], v[5]) } else { (v[1], v[3]) };
    let det = det2(a, b);
    if det.norm() <= DEGEN_TOL * a.norm() * b.norm() {
        return Err(Error::SingularMatrix);
    }
    Ok(Mat2::from_columns(a, b.scale(det.inv())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyCheck {
    pub arc: usize,
    pub trace: C,
    /// Projective distance between the fixed direction and H_arc.
    pub direction_error: f64,
    /// Max-entry distance between the recovered matrix and rho(g_arc).
    pub matrix_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub arcs: Vec<HolonomyCheck>,
    /// Arcs without a recorded meridian loop.
    pub missing: Vec<usize>,
    pub trace_invariant_error: Option<f64>,
    pub pass: bool,
}

pub fn holonomy_report(
    a: &PtolemyAssignment,
    d: &Diagram,
    rep: &WirtingerRep,
    dec: &Decoration,
) -> Result<HolonomyReport> {
    let mut arcs = Vec::new();
    let mut missing = Vec::new();
    let mut recovered = Vec::new();
    for arc in d.arcs.iter().copied() {
        match meridian_holonomy(a, d, arc) {
            Ok((p, m)) => {
                let f = meridian_frame(d, rep, dec, &p)?;
                let g = f * m * f.inv()?;
                let fixed = crate::decoration::eigen_direction(&g);
                let h = dec.h[arc - 1];
                arcs.push(HolonomyCheck {
                    arc,
                    trace: m.trace(),
                    direction_error: det2(fixed, h).norm() / (fixed.norm() * h.norm()),
                    matrix_error: g.max_diff(rep.g(arc)),
                });
                recovered.push(g);
            }
            Err(Error::PathNotRecorded { .. }) => missing.push(arc),
            Err(e) => return Err(e),
        }
    }
    let trace_invariant_error = missing.is_empty().then(|| {
        trace_invariants(&recovered)
            .iter()
            .zip(trace_invariants(&rep.matrices))
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    });
    let pass = arcs.iter().all(|h| (h.trace + 2.0).norm() <= 1e-8 && h.direction_error <= 1e-8 && h.matrix_error <= 1e-8)
        && trace_invariant_error.is_none_or(|e| e <= 1e-8);
    Ok(HolonomyReport { arcs, missing, trace_invariant_error, pass })
}
