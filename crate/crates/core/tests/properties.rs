use phaseless::geometry::{hausdorff, sample_boundary, BoundaryPolyline, Family, ScattererParams, Vec2};
use phaseless::io;
use phaseless::mcmc::{beta_step, fold_beta, hastings_alpha};
use phaseless::stats::{histogram, summarize};
use proptest::prelude::*;

fn polyline() -> impl Strategy<Value = BoundaryPolyline> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..20)
        .prop_map(|p| BoundaryPolyline::new(p.into_iter().map(|(x, y)| Vec2::new(x, y)).collect()).unwrap())
}

proptest! {
    #[test]
    fn hausdorff_is_a_metric(a in polyline(), b in polyline(), c in polyline()) {
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - hausdorff(&b, &a).unwrap()).abs() <= 1e-15);
        prop_assert!(ab <= hausdorff(&a, &c).unwrap() + hausdorff(&c, &b).unwrap() + 1e-12);
    }

    #[test]
    fn beta_stays_in_the_unit_interval(beta in 0.0..=1.0f64, gamma in 0.0..=1.0f64, u in 0.0..=1.0f64) {
        let next = beta_step(beta, gamma, u);
        prop_assert!((0.0..=1.0).contains(&next), "{}", next);
    }

    #[test]
    fn fold_maps_into_the_unit_interval(x in -1.0..=2.0f64) {
        let f = fold_beta(x);
        prop_assert!((0.0..=1.0).contains(&f));
        if (0.0..=1.0).contains(&x) {
            prop_assert_eq!(f, x);
        }
    }

    #[test]
    fn lower_misfit_never_lowers_acceptance(old in 0.0..1e6f64, a in 0.0..1e6f64, b in 0.0..1e6f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(hastings_alpha(old, lo) >= hastings_alpha(old, hi));
        prop_assert!((0.0..=1.0).contains(&hastings_alpha(old, hi)));
    }

    #[test]
    fn chain_csv_round_trips_bitwise(rows in prop::collection::vec(prop::collection::vec(-1e300..1e300f64, 4), 1..30)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("chain.csv");
        io::write_chain(&path, Family::Crack, &rows).unwrap();
        let (family, back) = io::read_chain(&path).unwrap();
        prop_assert_eq!(family, Family::Crack);
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn summaries_ignore_sample_order(
        rows in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 3), 2..40),
        rot in 0usize..40,
    ) {
        let exact = ScattererParams::from_vec(Family::Disk, &[1.0, 0.25, 0.12f64.ln()]).unwrap();
        let mut shuffled = rows.clone();
        shuffled.reverse();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        let a = summarize(&rows, &exact, false).unwrap();
        let b = summarize(&shuffled, &exact, false).unwrap();
        for (x, y) in a.components.iter().zip(&b.components) {
            prop_assert!((x.mean - y.mean).abs() <= 1e-12 * (1.0 + x.mean.abs()));
            prop_assert!((x.sd - y.sd).abs() <= 1e-12 * (1.0 + x.sd));
        }
    }

    #[test]
    fn histograms_keep_every_sample(x in prop::collection::vec(-1e3..1e3f64, 1..200), bins in 1usize..50) {
        let h = histogram(&x, bins).unwrap();
        prop_assert_eq!(h.total(), x.len());
        prop_assert_eq!(h.edges.len(), bins + 1);
        prop_assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn disk_boundary_samples_are_on_the_circle(cx in -3.0..3.0f64, cy in -3.0..3.0f64, lr in -3.0..1.0f64) {
        let p = ScattererParams::from_vec(Family::Disk, &[cx, cy, lr]).unwrap();
        let r = lr.exp();
        for q in sample_boundary(&p, 64).unwrap().points() {
            prop_assert!(((*q - Vec2::new(cx, cy)).norm() - r).abs() <= 1e-12 * (1.0 + r));
        }
    }
}
