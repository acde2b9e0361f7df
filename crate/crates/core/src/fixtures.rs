//! The worked 4_1-with-a-kink example: diagram, representation, and the
//! closed-form H, V and x tables in terms of (alpha, beta, gamma, lambda).

use crate::braid::{closure_diagram, parse_braid_word, Diagram};
use crate::linalg::{c, cr, Mat2, Vec2, C};
use crate::representation::WirtingerRep;

pub const KINK_BRAID: &str = "[-3,2,-3,2,-1]";
pub const EVEN_BRAID: &str = "[1,-2,1,-2]";
/// The sweep numbering differs from the reference figure by swapping regions 5 and 6.
pub const REGION_RELABEL: [usize; 7] = [1, 2, 3, 4, 6, 5, 7];
/// Parameters at which the tables are compared.
pub const TABLE_PARAMS: (f64, f64, f64) = (2.0, 1.0, 3.0);

pub struct Example41 {
    pub diagram: Diagram,
    pub rep: WirtingerRep,
    pub lambda: C,
}

/// Root of lambda^2 - lambda + 1 with positive imaginary part.
pub fn lambda() -> C {
    c(0.5, 3f64.sqrt() / 2.0)
}

pub fn rep_matrices(l: C) -> Vec<Mat2> {
    let one = cr(1.0);
    let g1 = Mat2::real(-1.0, -1.0, 0.0, -1.0);
    vec![
        g1,
        g1,
        Mat2::new(-one, cr(0.0), -l, -one),
        Mat2::new(-one - l, l, -l, -one + l),
        Mat2::new(cr(-2.0), l, -one + l, cr(0.0)),
    ]
}

pub fn kink_diagram() -> Diagram {
    let b = parse_braid_word(KINK_BRAID, None).expect("fixture braid parses");
    closure_diagram(&b).with_region_labels(&REGION_RELABEL).expect("fixture relabel is a permutation")
}

pub fn example_41() -> Example41 {
    let l = lambda();
    Example41 {
        diagram: kink_diagram(),
        rep: WirtingerRep::new(rep_matrices(l)).expect("fixture representation is valid"),
        lambda: l,
    }
}

/// Same PSL representation on the even-length braid. Arcs of `[1,-2,1,-2]`
/// map to fixture arcs 1, 3, 4, 5 (found by matching Wirtinger relations).
pub fn even_braid_rep() -> (Diagram, WirtingerRep) {
    let d = closure_diagram(&parse_braid_word(EVEN_BRAID, None).expect("braid parses"));
    let m = rep_matrices(lambda());
    (d, WirtingerRep::unchecked(vec![m[0], m[2], m[3], m[4]]))
}

pub fn h_table(l: C) -> [Vec2; 5] {
    let one = cr(1.0);
    [
        Vec2::real(1.0, 0.0),
        Vec2::real(-1.0, 0.0),
        Vec2::new(cr(0.0), -one + l),
        Vec2::new(one - l, one - l),
        Vec2::new(-one + l, l),
    ]
}

pub fn v_table(a: C, b: C, l: C) -> [Vec2; 7] {
    let one = cr(1.0);
    [
        Vec2::new(a, b),
        Vec2::new(-a + b, -b),
        Vec2::new(a - b * 2.0, b),
        Vec2::new(a * (one - l) + b * (l * 2.0 - 1.0), -a * l + b * (one + l * 2.0)),
        Vec2::new(-a + b * 2.0, a * l - b * (one + l * 2.0)),
        Vec2::new(a * (l - 1.0) + b * (-l * 3.0 + 2.0), a * l - b * (one + l * 3.0)),
        Vec2::new(a * (one - l) + b * (l * 3.0 - 2.0), -a * (one + l) + b * 2.0 * (l + 2.0)),
    ]
}

/// Levels 1..=5 of the solution, 13 entries each.
pub fn x_table(a: C, b: C, g: C, l: C) -> [[C; 13]; 5] {
    let one = cr(1.0);
    let e1 = a - b * g;
    let e4 = -a + b * g + b;
    let e7 = a - b * (g + 2.0);
    let p = (l - 1.0) * (a - b * 3.0);
    let q = (g - 1.0) * (l - 1.0);
    let r = a * (-g * l + l - 1.0) + b * (l * 3.0 * (g - 1.0) + g + 2.0);
    let s = a * l - b * (l * 2.0 + 1.0);
    let t = g - g * l;
    let u = a * ((g - 1.0) * l + g + 1.0) - b * (g * 2.0 * (l + 2.0) - l * 3.0 + 2.0);
    let v = -g * l + l - 1.0;
    let w = b * (g * l * 2.0 + g + 2.0) - a * (g * l + 1.0);
    let x3_5 = -(l - 1.0) * (a - b * 2.0);
    let x3_7 = (g - 1.0) * l * (a - b * 2.0) + a - b * (g + 1.0);
    [
        [e1, b, one, e4, b, -one, e7, p, q, r, s, t, u],
        [e1, b, one, e4, b, -one, e7, -(l * l) * (a - b * 2.0), t, w, p, v, u],
        [e1, b, one, e4, x3_5, q, x3_7, s, -one, w, p, v, u],
        [e1, b, one, e4, x3_5, q, x3_7, -b, v, r, s, t, u],
        [e1, b, one, e4, -b, one, e7, p, q, r, s, t, u],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::verify_relations;

    #[test]
    fn lambda_is_a_root() {
        let l = lambda();
        assert!((l * l - l + 1.0).norm() < 1e-15);
    }

    #[test]
    fn even_braid_rep_satisfies_relations() {
        let (d, rep) = even_braid_rep();
        assert!(verify_relations(&d, &rep).pass);
    }

    #[test]
    fn kink_regions_match_reference_numbering() {
        let d = kink_diagram();
        let expect = [[1, 2, 3, 6, 7], [1, 2, 3, 5, 7], [1, 2, 4, 5, 7], [1, 2, 4, 6, 7], [1, 2, 3, 6, 7]];
        for (row, e) in d.region_at.iter().zip(expect.iter()) {
            assert_eq!(row.as_slice(), e);
        }
    }
}
