//! One line per acceptance criterion; exits non-zero if any fails.

use std::time::{Duration, Instant};

use knotcluster::braid::{closure_diagram, parse_braid_word};
use knotcluster::cli;
use knotcluster::cluster::{apply_r, check_nondegenerate, evolve, is_solution};
use knotcluster::decoration::{arc_colorings, assemble_solution, decorate, generic_decoration};
use knotcluster::error::Error;
use knotcluster::fixtures;
use knotcluster::geometry::{all_shapes, gluing_residual, volume};
use knotcluster::linalg::{cr, rel_err, Vec2, C};
use knotcluster::ptolemy::{
    boundary_checks, braid_obstruction, extend_assignment, holonomy_report, solve_relations,
    triangle_products, verify_crossing_relations,
};
use knotcluster::representation::{obstruction_class, solve_parabolic, trace_invariants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_TOL: f64 = 1e-10;
const DYNAMICS_TOL: f64 = 1e-8;
const R_TOL: f64 = 1e-9;
const PTOLEMY_TOL: f64 = 1e-10;
const RELATION_SOLVE_TOL: f64 = 1e-9;
const FACE_TOL: f64 = 1e-9;
const HOLONOMY_TOL: f64 = 1e-8;
const VOLUME_TOL: f64 = 1e-6;
const GLUING_TOL: f64 = 1e-8;
const EISENSTEIN_TOL: f64 = 1e-8;
const RUNTIME: Duration = Duration::from_secs(1);
const SEEDS: u64 = 20;
const WINDOWS: usize = 1000;
const EXPECTED_VOLUME: f64 = 2.029883212819307;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rand_c(rng: &mut ChaCha8Rng) -> C {
    loop {
        let z = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() > 0.1 {
            return z;
        }
    }
}

fn rand_window(rng: &mut ChaCha8Rng) -> [C; 7] {
    std::array::from_fn(|_| rand_c(rng))
}

fn window_rel(a: &[C; 7], b: &[C; 7]) -> f64 {
    let s = a.iter().chain(b).map(|z| z.norm()).fold(1e-300, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / s
}

/// Clausen sum sum_{n>=1} sin(n pi/3)/n^2, in blocks of one period.
fn clausen_pi_3() -> f64 {
    let s = [0.0, 1.0, 1.0, 0.0, -1.0, -1.0].map(|x: f64| x * 3f64.sqrt() / 2.0);
    let mut total = 0.0;
    let mut block = 0u64;
    while block < 1_000_000 {
        let b = 6 * block;
        for r in 1..6 {
            let n = (b + r) as f64;
            total += s[r as usize] / (n * n);
        }
        block += 1;
    }
    total
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let f = fixtures::example_41();
    let (a, b, g) = fixtures::TABLE_PARAMS;
    let (a, b, g) = (cr(a), cr(b), cr(g));
    let dec = decorate(&f.diagram, &f.rep, [a, b, g], Some(Vec2::real(1.0, 0.0))).map_err(|e| e.to_string())?;
    let vec_err = |x: &[Vec2], y: &[Vec2]| {
        x.iter().zip(y).flat_map(|(p, q)| (0..2).map(move |k| rel_err(p.0[k], q.0[k]))).fold(0.0, f64::max)
    };
    let h = vec_err(&dec.h, &fixtures::h_table(f.lambda));
    let v = vec_err(&dec.v, &fixtures::v_table(a, b, f.lambda));
    let tuples = assemble_solution(&f.diagram, &dec);
    let x = fixtures::x_table(a, b, g, f.lambda)
        .iter()
        .zip(&tuples)
        .flat_map(|(row, t)| row.iter().zip(&t.0).map(|(p, q)| rel_err(*p, *q)))
        .fold(0.0, f64::max);
    let sizes_ok = tuples.iter().all(|t| t.len() == 13);
    let dt = t0.elapsed();
    check(
        h <= TABLE_TOL && v <= TABLE_TOL && x <= TABLE_TOL && sizes_ok && dt < RUNTIME,
        format!("H err {h:.1e}, V err {v:.1e}, x err {x:.1e} (tol {TABLE_TOL:.0e}), {dt:?}"),
    )
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let run = || {
        let f = fixtures::example_41();
        let class = obstruction_class(&f.diagram, &f.rep);
        let (d, rep) = fixtures::even_braid_rep();
        let even = arc_colorings(&d, &rep, None);
        (class, braid_obstruction(f.diagram.len()), even)
    };
    let first = run();
    let second = run();
    let dt = t0.elapsed();
    let (class, parity, even) = first.clone();
    check(
        class == Ok(-1)
            && parity == -1
            && even == Err(Error::ObstructionMismatch { rep: -1, braid: 1 })
            && first == second
            && dt < RUNTIME,
        format!("obstruction {class:?} vs (-1)^5 = {parity}; even braid -> {even:?}; {dt:?}"),
    )
}

fn criterion_3() -> Outcome {
    let f = fixtures::example_41();
    let mut worst = 0.0f64;
    let mut nondeg = 0;
    let mut draws = 0;
    for seed in 0..SEEDS {
        let (dec, k) = generic_decoration(&f.diagram, &f.rep, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        draws += k;
        let built = assemble_solution(&f.diagram, &dec);
        let evolved = evolve(&f.diagram.braid, &built[0]).map_err(|e| format!("seed {seed}: {e}"))?;
        for (p, q) in evolved.iter().zip(&built) {
            for (a, b) in p.0.iter().zip(&q.0) {
                worst = worst.max(rel_err(*a, *b));
            }
        }
        if !is_solution(&evolved, DYNAMICS_TOL) {
            return Err(format!("seed {seed}: x^6 != x^1"));
        }
        if check_nondegenerate(&evolved, Some(&f.diagram.braid)).pass {
            nondeg += 1;
        }
    }
    check(
        worst <= DYNAMICS_TOL && nondeg == SEEDS,
        format!("{SEEDS} seeds ({draws} draws): max level error {worst:.1e}, non-degenerate {nondeg}/{SEEDS}"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut used = 0;
    while used < WINDOWS {
        let x = rand_window(&mut rng);
        let (Ok(p), Ok(m)) = (apply_r(1, &x), apply_r(-1, &x)) else { continue };
        let (Ok(pm), Ok(mp)) = (apply_r(-1, &p), apply_r(1, &m)) else { continue };
        worst = worst.max(window_rel(&pm, &x)).max(window_rel(&mp, &x));
        used += 1;
    }
    let ones = [cr(1.0); 7];
    let plus = apply_r(1, &ones).map_err(|e| e.to_string())?;
    let minus = apply_r(-1, &ones).map_err(|e| e.to_string())?;
    let exact = plus == [1., 1., 3., 5., 3., 1., 1.].map(cr) && minus == [1., 3., 1., 5., 1., 3., 1.].map(cr);
    check(
        worst <= R_TOL && exact,
        format!("{WINDOWS} windows: max inverse error {worst:.1e} (tol {R_TOL:.0e}); all-ones exact: {exact}"),
    )
}

fn criterion_5() -> Outcome {
    let f = fixtures::example_41();
    let (dec, _) = generic_decoration(&f.diagram, &f.rep, cli::DEFAULT_SEED).map_err(|e| e.to_string())?;
    let a = extend_assignment(&f.diagram, &assemble_solution(&f.diagram, &dec)).map_err(|e| e.to_string())?;
    let rep = verify_crossing_relations(&a);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut used = 0;
    while used < WINDOWS {
        let x = rand_window(&mut rng);
        let sign = if used % 2 == 0 { 1 } else { -1 };
        let (Ok((t, _)), Ok(r)) = (solve_relations(sign, &x), apply_r(sign, &x)) else { continue };
        worst = worst.max(window_rel(&t, &r));
        used += 1;
    }
    check(
        rep.max_residual <= PTOLEMY_TOL && worst <= RELATION_SOLVE_TOL,
        format!(
            "fixture: 10 relations x {} crossings, max residual {:.1e}; relations solved vs R on {WINDOWS} windows {worst:.1e}",
            a.crossings.len(),
            rep.max_residual
        ),
    )
}

fn criterion_6() -> Outcome {
    let f = fixtures::example_41();
    let d = &f.diagram;
    let (dec, _) = generic_decoration(d, &f.rep, cli::DEFAULT_SEED).map_err(|e| e.to_string())?;
    let a = extend_assignment(d, &assemble_solution(d, &dec)).map_err(|e| e.to_string())?;
    let faces = triangle_products(&a, false);
    let face_max = faces.iter().map(|t| t.residual).fold(0.0, f64::max);
    let bnd = boundary_checks(&a, d);
    let eps_exact = bnd
        .iter()
        .all(|b| b.diagonal.iter().all(|z| *z == cr(b.expected as f64)) && b.lower_left == 0.0);
    let mer = bnd.iter().filter(|b| b.kind == "meridian").all(|b| b.expected == -1);
    let lon = bnd.iter().filter(|b| b.kind == "longitude").all(|b| b.expected == 1);
    let hol = holonomy_report(&a, d, &f.rep, &dec).map_err(|e| e.to_string())?;
    let tr = hol.arcs.iter().map(|h| (h.trace + 2.0).norm()).fold(0.0, f64::max);
    let dir = hol.arcs.iter().map(|h| h.direction_error).fold(0.0, f64::max);
    let inv = hol.trace_invariant_error.unwrap_or(f64::INFINITY);
    check(
        face_max <= FACE_TOL && eps_exact && mer && lon && tr <= HOLONOMY_TOL && dir <= HOLONOMY_TOL && inv <= HOLONOMY_TOL,
        format!(
            "{} faces max {face_max:.1e}; boundary diagonals exact: {eps_exact} (mu -> -1: {mer}, lambda_bf -> +1: {lon}); \
             meridian trace err {tr:.1e}, direction err {dir:.1e}, trace invariants {inv:.1e}",
            faces.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let oracle = 2.0 * clausen_pi_3();
    let t0 = Instant::now();
    let f = fixtures::example_41();
    let (dec, _) = generic_decoration(&f.diagram, &f.rep, cli::DEFAULT_SEED).map_err(|e| e.to_string())?;
    let shapes = all_shapes(&f.diagram, &f.rep, &dec).map_err(|e| e.to_string())?;
    let vol = volume(&shapes).map_err(|e| e.to_string())?;
    let glue = gluing_residual(&shapes, &f.diagram);

    let d3 = closure_diagram(&parse_braid_word("[1,1,1]", None).unwrap());
    let rep3 = solve_parabolic(&d3, cli::DEFAULT_SEED, 64).map_err(|e| e.to_string())?.remove(0).rep;
    let (dec3, _) = generic_decoration(&d3, &rep3, cli::DEFAULT_SEED).map_err(|e| e.to_string())?;
    let shapes3 = all_shapes(&d3, &rep3, &dec3).map_err(|e| e.to_string())?;
    let vol3 = volume(&shapes3).map_err(|e| e.to_string())?;
    let dt = t0.elapsed();
    check(
        (vol - oracle).abs() <= VOLUME_TOL
            && (vol - EXPECTED_VOLUME).abs() <= VOLUME_TOL
            && glue.max_residual <= GLUING_TOL
            && vol3.abs() <= VOLUME_TOL
            && dt < RUNTIME,
        format!(
            "4_1 volume {vol:.15} vs oracle {oracle:.15}; {} edge classes, max gluing residual {:.1e}; trefoil volume {vol3:.1e}; {dt:?}",
            glue.classes.len(),
            glue.max_residual
        ),
    )
}

fn criterion_8() -> Outcome {
    let d = closure_diagram(&parse_braid_word(fixtures::EVEN_BRAID, None).unwrap());
    let sols = solve_parabolic(&d, cli::DEFAULT_SEED, 64).map_err(|e| e.to_string())?;
    let n = d.arcs.len();
    let best = sols
        .iter()
        .flat_map(|s| trace_invariants(&s.rep.matrices).into_iter().take(n * (n - 1) / 2))
        .map(|t| {
            let u = t - 2.0;
            (u * u - u + 1.0).norm()
        })
        .fold(f64::INFINITY, f64::min);
    let unknot = closure_diagram(&parse_braid_word("[1]", None).unwrap());
    let none = solve_parabolic(&unknot, cli::DEFAULT_SEED, 64);
    check(
        best <= EISENSTEIN_TOL && matches!(none, Err(Error::NoSolutionFound { .. })),
        format!("4_1: {} solutions, min |u^2-u+1| = {best:.1e}; unknot -> {:?}", sols.len(), none.err()),
    )
}

fn criterion_9() -> Outcome {
    let dir = std::env::temp_dir().join(format!("knotcluster-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let rep_path = dir.join("rep41.json");
    let f = fixtures::example_41();
    std::fs::write(&rep_path, f.rep.to_json(None).to_string()).map_err(|e| e.to_string())?;
    let rp = rep_path.to_str().unwrap();
    let kink = fixtures::KINK_BRAID;
    let commands: Vec<Vec<&str>> = vec![
        vec!["parse", "--braid", kink],
        vec!["solve", "--braid", "[1,-2,1,-2]", "--seed", "7"],
        vec!["build", "--braid", kink, "--rep", rp, "--seed", "7"],
        vec!["build", "--braid", kink, "--seed", "7"],
        vec!["verify", "--braid", kink, "--rep", rp, "--seed", "7"],
        vec!["obstruction", "--braid", kink, "--rep", rp],
        vec!["volume", "--braid", kink, "--rep", rp, "--seed", "7"],
        vec!["evolve", "--braid", "[1]", "--width", "3", "--tuple", "[1,1,1,1,1,1,1,1,1,1]"],
        vec!["example-41", "--seed", "7"],
    ];
    let mut bad = Vec::new();
    for c in &commands {
        let argv: Vec<&str> = std::iter::once("knotcluster").chain(c.iter().copied()).collect();
        let a = cli::run(argv.clone());
        let b = cli::run(argv);
        if a != b || a.1.is_empty() {
            bad.push(c[0]);
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(bad.is_empty(), format!("{} command runs repeated; differing: {bad:?}", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden fixture tables", criterion_1),
        ("parity theorem", criterion_2),
        ("dynamics agree with construction", criterion_3),
        ("R-operator properties", criterion_4),
        ("Ptolemy relations", criterion_5),
        ("cocycle and holonomy", criterion_6),
        ("volume and gluing", criterion_7),
        ("parabolic solver", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("criterion {} PASS {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
