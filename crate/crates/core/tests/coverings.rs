use graded_weyl::coverings::{greedy_cover, greedy_cover_region, lplq_norm, partition_functions, CoverSpace, Region, SampleGrid};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn families() -> Vec<(CoverSpace, f64, usize)> {
    vec![
        (CoverSpace::Euclidean(1), 10.0, 400),
        (CoverSpace::Euclidean(2), 6.0, 60),
        (CoverSpace::Graded(vec![1, 2]), 4.0, 60),
        (CoverSpace::Euclidean(3), 3.0, 18),
        (CoverSpace::Heisenberg, 2.0, 18),
    ]
}

#[test]
fn multiplicity_bound_on_random_regions() {
    let mut rng = StdRng::seed_from_u64(11);
    for (space, extent, per_axis) in families() {
        let bound = 5f64.powf(space.delta());
        let mut worst = 0;
        for _ in 0..100 {
            let region = Region::random(space.dim(), extent, &mut rng);
            let eps = rng.random_range(0.3..0.6);
            let cover = greedy_cover_region(&space, &region, eps, per_axis).unwrap();
            assert!(cover.covers(&region.sample(per_axis)));
            let m = cover.max_multiplicity(1);
            assert!(m as f64 <= bound, "{space:?}: multiplicity {m} above {bound}");
            worst = worst.max(m);
        }
        assert!(worst > 1, "{space:?}: degenerate coverings");
    }
}

#[test]
fn dilated_multiplicity_bound_in_the_plane() {
    let mut rng = StdRng::seed_from_u64(5);
    for space in [CoverSpace::Euclidean(2), CoverSpace::Graded(vec![1, 1])] {
        for _ in 0..100 {
            let region = Region::random(2, 8.0, &mut rng);
            let cover = greedy_cover_region(&space, &region, 0.5, 80).unwrap();
            assert!(cover.max_multiplicity(2) as f64 <= cover.multiplicity_bound(2));
            assert_eq!(cover.multiplicity_bound(2), 81.0);
        }
    }
}

#[test]
fn centers_are_separated() {
    let mut rng = StdRng::seed_from_u64(2);
    for (space, extent, per_axis) in families() {
        let region = Region::random(space.dim(), extent, &mut rng);
        let cover = greedy_cover_region(&space, &region, 0.5, per_axis).unwrap();
        for (i, a) in cover.centers.iter().enumerate() {
            for b in &cover.centers[i + 1..] {
                assert!(space.distance(a, b) >= 0.5);
            }
        }
    }
}

#[test]
fn empty_region_gives_empty_cover() {
    for (space, _, _) in families() {
        assert!(greedy_cover_region(&space, &Region::empty(), 1.0, 10).unwrap().is_empty());
    }
}

#[test]
fn partition_mass_defect_by_level() {
    for space in [CoverSpace::Euclidean(2), CoverSpace::Graded(vec![1, 2])] {
        for level in [3u32, 4, 5] {
            let r = 0.5f64.powi(level as i32 + 1);
            let height = if space.axis_degree(1) == 2 { 16.0 * r * r } else { 1.0 };
            let region = Region::Box { lo: vec![0.0, 0.0], hi: vec![1.0, height] };
            let n = (4.0 / r).ceil() as usize + 3;
            let ny = (height / (r / 4.0).powi(space.axis_degree(1))).ceil() as usize + 3;
            let grid = SampleGrid::new(vec![0.0, 0.0], vec![1.0, height], vec![n, ny]).unwrap();
            let cover = greedy_cover(&space, &grid.points(), r).unwrap();
            let part = partition_functions(&cover, level, &grid).unwrap();
            assert!(part.pairwise_disjoint());
            assert!(part.values_in_unit_interval());
            assert!(part.max_support_diameter(&space) <= 0.5f64.powi(level as i32));
            let d = part.mass_defect(&region);
            let target = 0.5f64.powi(level as i32);
            assert!(d.transition <= target * (1.0 + 1e-12), "{space:?} l={level}: {d:?}");
            // samples tied with a ball boundary, one cell per partition cell
            let slack = cover.len() as f64 * part.cell_measure;
            assert!(d.total() <= target + slack, "{space:?} l={level}: {d:?}");
        }
    }
}

fn plane_samples(n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let grid = SampleGrid::new(vec![0.0, 0.0], vec![3.0, 2.0], vec![3 * n, 2 * n]).unwrap();
    let pts = grid.points();
    let w = vec![grid.cell_volume(); pts.len()];
    (pts, w)
}

#[test]
fn lplq_equivalent_to_lp_when_exponents_agree() {
    let space = CoverSpace::Euclidean(2);
    let (pts, w) = plane_samples(40);
    let cover = greedy_cover(&space, &pts, 0.4).unwrap();
    let mult = cover.max_multiplicity(1) as f64;
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..20 {
        let p = rng.random_range(1.0..4.0);
        let (a, b, c) = (rng.random_range(-2.0..2.0), rng.random_range(0.5..3.0), rng.random_range(0.0..6.0));
        let f: Vec<f64> = pts.iter().map(|x| a * (b * x[0] + c * x[1]).sin() + x[0] * x[1] - 1.0).collect();
        let lp = f.iter().zip(&w).map(|(v, w)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let n = lplq_norm(&pts, &f, &w, p, p, &cover).unwrap();
        assert!(n >= lp * (1.0 - 1e-12), "{n} < {lp}");
        assert!(n <= mult.powf(1.0 / p) * lp * (1.0 + 1e-12), "{n} > {mult}^(1/p) {lp}");
    }
}

#[test]
fn lplq_is_monotone() {
    let space = CoverSpace::Graded(vec![1, 2]);
    let (pts, w) = plane_samples(30);
    let cover = greedy_cover(&space, &pts, 0.5).unwrap();
    let mut rng = StdRng::seed_from_u64(4);
    for (p, q) in [(1.0, 2.0), (2.0, 1.0), (3.0, f64::INFINITY), (f64::INFINITY, 2.0)] {
        let g: Vec<f64> = pts.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let f: Vec<f64> = g.iter().map(|v| v * rng.random_range(0.0..1.0)).collect();
        assert!(lplq_norm(&pts, &f, &w, p, q, &cover).unwrap() <= lplq_norm(&pts, &g, &w, p, q, &cover).unwrap());
    }
    assert!(lplq_norm(&pts, &vec![0.0; pts.len()], &w, 1.0, -1.0, &cover).is_err());
}

#[test]
fn cover_csv_lists_centers() {
    let space = CoverSpace::Euclidean(2);
    let cover = greedy_cover_region(&space, &Region::Box { lo: vec![0.0, 0.0], hi: vec![2.0, 1.0] }, 0.5, 40).unwrap();
    let csv = cover.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,x0,x1,radius"));
    assert_eq!(lines.count(), cover.len());
}
