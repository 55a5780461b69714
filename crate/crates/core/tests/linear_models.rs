//! Linear-algebra, Spin-lift and flow results checked against independent
//! constructions with known answers.

mod common;

use proptest::prelude::*;
use twistlab_core::linalg_paths::{
    canonical_pair, direct_sum, negative_parity, path_commutator_residual, synth_commuting_path, CommutingPair,
    FnPath,
};
use twistlab_core::local_flows::{chi, flow_point, FlowOptions};
use twistlab_core::spin_lift::{lift_loop, SOLoop};
use twistlab_core::{SquareMatrix, Vector};

/// One invariant block of a simultaneously block-diagonal pair.
#[derive(Debug, Clone)]
enum Block {
    Real(f64, f64),
    /// `r·Rot(θ)` for both, a complex-conjugate eigenvalue pair.
    Rot(f64, f64, f64, f64),
}

fn block_matrix(b: &Block, first: bool) -> SquareMatrix {
    match *b {
        Block::Real(a, c) => SquareMatrix::from_element(1, 1, if first { a } else { c }),
        Block::Rot(ra, ta, rc, tc) => {
            let (r, t) = if first { (ra, ta) } else { (rc, tc) };
            SquareMatrix::from_row_slice(2, 2, &[r * t.cos(), -r * t.sin(), r * t.sin(), r * t.cos()])
        }
    }
}

fn arb_block(slot: usize) -> impl Strategy<Value = Block> {
    // Distinct magnitudes per slot keep eigenvalues separated.
    let mag = 1.0 + 0.37 * slot as f64;
    prop_oneof![
        (prop::bool::ANY, prop::bool::ANY).prop_map(move |(sa, sc)| Block::Real(
            if sa { -mag } else { mag },
            if sc { -mag * 1.3 } else { mag * 1.3 }
        )),
        (0.3f64..2.8, 0.3f64..2.8).prop_map(move |(ta, tc)| Block::Rot(mag + 3.0, ta, mag + 4.0, tc)),
    ]
}

fn arb_blocks() -> impl Strategy<Value = Vec<Block>> {
    (2usize..=5).prop_flat_map(|k| (0..k).map(arb_block).collect::<Vec<_>>())
}

/// The parity read off directly from the block data.
fn parity_oracle(blocks: &[Block]) -> u8 {
    (blocks.iter().filter(|b| matches!(b, Block::Real(a, c) if *a < 0.0 && *c < 0.0)).count() % 2) as u8
}

/// Flips one real eigenvalue where needed so both determinants are positive.
fn orientation_preserving(mut blocks: Vec<Block>) -> Vec<Block> {
    let negatives = |bs: &[Block], first: bool| {
        bs.iter().filter(|b| matches!(b, Block::Real(a, c) if (if first { *a } else { *c }) < 0.0)).count()
    };
    for first in [true, false] {
        if negatives(&blocks, first) % 2 == 1 {
            if let Some(Block::Real(a, c)) = blocks.iter_mut().find(|b| matches!(b, Block::Real(..))) {
                if first { *a = -*a } else { *c = -*c }
            }
        }
    }
    blocks
}

fn assemble(blocks: &[Block], first: bool) -> SquareMatrix {
    blocks.iter().skip(1).fold(block_matrix(&blocks[0], first), |acc, b| direct_sum(&acc, &block_matrix(b, first)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity_matches_block_oracle(blocks in arb_blocks(), seed in 0u64..10_000) {
        let a = assemble(&blocks, true);
        let c = assemble(&blocks, false);
        let mut rng = common::rng(seed);
        let b = common::random_conjugator(&mut rng, a.nrows());
        let pair = CommutingPair::general(a, c, 1e-12).unwrap().conjugate_by(&b).unwrap();
        prop_assert_eq!(negative_parity(&pair).unwrap(), parity_oracle(&blocks));
    }

    #[test]
    fn synthesized_paths_commute_and_end_canonically(blocks in arb_blocks(), seed in 0u64..10_000) {
        let blocks = orientation_preserving(blocks);
        let a = assemble(&blocks, true);
        let c = assemble(&blocks, false);
        prop_assume!(a.nrows() >= 3);
        prop_assert!(a.determinant() > 0.0 && c.determinant() > 0.0);
        let mut rng = common::rng(seed);
        let b = common::random_conjugator(&mut rng, a.nrows());
        let pair = CommutingPair::new(a, c, 1e-12).unwrap().conjugate_by(&b).unwrap();
        let paths = synth_commuting_path(&pair, 256).unwrap();
        prop_assert_eq!(paths.nu, parity_oracle(&blocks));
        // Residual recomputed from the samples, independent of the synthesizer's bookkeeping.
        prop_assert!(path_commutator_residual(&paths.alpha, &paths.gamma).unwrap() <= 1e-8);
        let canonical = canonical_pair(pair.n(), paths.nu).unwrap();
        prop_assert!((paths.alpha.end() - canonical.a()).abs().max() <= 1e-8);
        prop_assert!((paths.gamma.end() - canonical.c()).abs().max() <= 1e-8);
        prop_assert!((paths.alpha.start() - pair.a()).abs().max() <= 1e-9);
        for (t, m) in paths.alpha.samples().iter().chain(paths.gamma.samples()) {
            prop_assert!(m.determinant() > 0.0, "det <= 0 at t = {t}");
        }
    }
}

fn rot(axis: usize, angle: f64) -> SquareMatrix {
    let (s, c) = angle.sin_cos();
    let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut m = SquareMatrix::identity(3, 3);
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

/// Unit quaternion of a rotation (Shepperd's method), as `[w, x, y, z]`.
fn to_quaternion(r: &SquareMatrix) -> [f64; 4] {
    let t = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
    let q = if t > 0.0 {
        let s = 2.0 * (1.0 + t).sqrt();
        [s / 4.0, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s]
    } else if r[(0, 0)] >= r[(1, 1)] && r[(0, 0)] >= r[(2, 2)] {
        let s = 2.0 * (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt();
        [(r[(2, 1)] - r[(1, 2)]) / s, s / 4.0, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s]
    } else if r[(1, 1)] >= r[(2, 2)] {
        let s = 2.0 * (1.0 - r[(0, 0)] + r[(1, 1)] - r[(2, 2)]).sqrt();
        [(r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, s / 4.0, (r[(1, 2)] + r[(2, 1)]) / s]
    } else {
        let s = 2.0 * (1.0 - r[(0, 0)] - r[(1, 1)] + r[(2, 2)]).sqrt();
        [(r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, s / 4.0]
    };
    q
}

/// Continuation lift through SU(2): flip each quaternion to stay near the previous.
fn quaternion_lift_sign(samples: &[(f64, SquareMatrix)]) -> i8 {
    let start = to_quaternion(&samples[0].1);
    let mut prev = start;
    for (_, r) in &samples[1..] {
        let mut q = to_quaternion(r);
        if (0..4).map(|i| q[i] * prev[i]).sum::<f64>() < 0.0 {
            q = q.map(|x| -x);
        }
        prev = q;
    }
    if (0..4).map(|i| prev[i] * start[i]).sum::<f64>() > 0.0 { 1 } else { -1 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn so3_lift_agrees_with_quaternion_continuation(
        winds in -3i32..=3, wiggle in 0.0f64..1.5, axis in 0usize..3, extra in 0usize..3,
    ) {
        let l = SOLoop::from_fn(512, |t| {
            let tau = 2.0 * std::f64::consts::PI * t;
            rot(axis, winds as f64 * tau) * rot((axis + 1) % 3, wiggle * tau.sin())
        }).unwrap();
        let oracle = quaternion_lift_sign(l.samples());
        prop_assert_eq!(oracle, if winds % 2 == 0 { 1 } else { -1 });
        prop_assert_eq!(lift_loop(&l).unwrap(), oracle);
        // Stabilizing into SO(3 + extra) keeps the class.
        let n = 3 + extra;
        let big = SOLoop::new(l.samples().iter().map(|(t, m)| {
            let mut b = SquareMatrix::identity(n, n);
            b.view_mut((0, 0), (3, 3)).copy_from(m);
            (*t, b)
        }).collect()).unwrap();
        prop_assert_eq!(lift_loop(&big).unwrap(), oracle);
    }

    #[test]
    fn flow_inside_unit_ball_is_linear(seed in 0u64..10_000, t in 0.0f64..1.0) {
        let mut rng = common::rng(seed);
        let n = 2 + (seed % 4) as usize;
        let x = common::gaussian_matrix(&mut rng, n);
        let x = &x * (0.4 / x.norm());
        let rho = FnPath::new(n, (0.0, 1.0), {
            let x = x.clone();
            move |s| (&x * s).exp()
        });
        let v = common::vector_in_shell(&mut rng, n, 0.0, 0.5);
        let got = flow_point(&rho, t, &v, FlowOptions::default()).unwrap();
        let want: Vector = (&x * t).exp() * &v;
        prop_assert!((got - want).abs().max() <= 1e-8);
    }

    #[test]
    fn cutoff_shape(r in 0.0f64..5.0, dr in 0.0f64..0.5) {
        let (c, d) = chi(r).unwrap();
        let (c2, _) = chi(r + dr).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(c2 <= c + 1e-15);
        prop_assert!(d <= 1e-15);
        if r <= 1.0 { prop_assert_eq!(c, 1.0); }
        if r >= 2.0 { prop_assert_eq!(c, 0.0); prop_assert_eq!(d, 0.0); }
    }
}

#[test]
fn conjugated_canonical_pair_synthesizes_back() {
    let mut rng = common::rng(99);
    for n in 3..=6 {
        let b = common::random_conjugator(&mut rng, n);
        let pair = canonical_pair(n, 1).unwrap().conjugate_by(&b).unwrap();
        let paths = synth_commuting_path(&pair, 512).unwrap();
        assert_eq!(paths.nu, 1);
        assert!(paths.endpoint_error <= 1e-8 && paths.max_commutator <= 1e-8, "n = {n}");
    }
}
