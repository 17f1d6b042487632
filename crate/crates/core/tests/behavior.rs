mod common;

use std::collections::BTreeMap;

use num_rational::Ratio;
use proptest::prelude::*;
use rallyforge_core::behavior::{
    fit_models, Bandwidths, CellKey, ConditionalModel, Feature, Granularity, Kind, Level,
    ModelConfig, ModelData, OpponentFilter, PointStateDescriptor, Relaxation, Sample, ANY,
};
use rallyforge_core::court::{region_of, CourtSpec};
use rallyforge_core::kde::{Kde1, Kde2};
use rallyforge_core::{ShotType, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample(key: [u8; 5], shot: ShotType, v_b: f64, x_b: Vec2, recovery: Vec2) -> Sample {
    let court = CourtSpec::<f64>::default();
    Sample {
        clip_id: 0,
        key: CellKey(key),
        shot_type: shot,
        v_b: Some(v_b),
        x_b: Some(x_b),
        placement: Some(Granularity::Full.code(region_of(x_b, &court))),
        recovery,
        front: recovery.y.abs() < court.depth_boundary(),
    }
}

fn model(samples: Vec<Sample>, h: f64) -> ConditionalModel {
    ConditionalModel::from_data(ModelData {
        player_id: "p".into(),
        opponent_filter: OpponentFilter::Any,
        config: ModelConfig::default(),
        bandwidths: Bandwidths {
            velocity: 2.0,
            placement: h,
            recovery: h,
        },
        samples,
    })
    .unwrap()
}

const BASE: Vec2 = Vec2 { x: 0.0, y: 12.5 };

#[test]
fn categorical_is_the_exact_clip_fraction() {
    let db = common::standard_db(60, 11);
    let cfg = ModelConfig::default();
    let m = fit_models(&db, "a", &OpponentFilter::Any, &cfg).unwrap();
    // Count straight from the database.
    let mut counts: BTreeMap<CellKey, [u64; 7]> = BTreeMap::new();
    for &i in db.by_player("a") {
        let c = db.clip(i);
        let Some(t) = c.shot_type.filter(|t| *t != ShotType::Serve) else {
            continue;
        };
        let Some(d) = PointStateDescriptor::of_clip(&db, i, &cfg.descriptor.bins) else {
            continue;
        };
        counts.entry(d.key(&cfg.descriptor)).or_default()[t.index()] += 1;
    }
    let cells = m.cells();
    assert_eq!(cells.len(), counts.len());
    for (key, cat) in cells {
        let want = counts[&key];
        let total: u64 = want.iter().sum();
        for t in ShotType::ALL {
            assert_eq!(cat.probability_exact(t), Ratio::new(want[t.index()], total));
        }
    }
}

#[test]
fn categorical_on_a_hand_built_cell() {
    let k = [1, 1, 1, 1, 1];
    let p = Vec2::new(0.0, -10.0);
    let m = model(
        vec![
            sample(k, ShotType::ForehandTopspin, 20.0, p, BASE),
            sample(k, ShotType::ForehandTopspin, 20.0, p, BASE),
            sample(k, ShotType::BackhandUnderspin, 20.0, p, BASE),
            sample([2, 1, 1, 1, 1], ShotType::ForehandVolley, 20.0, p, BASE),
        ],
        0.5,
    );
    let look = m.marginalized_lookup(Kind::ANY_SHOT, CellKey(k)).unwrap();
    assert_eq!(look.level, Level::Cell(Relaxation::NONE));
    let cat = m.categorical(&look.support);
    assert_eq!(
        cat.probability_exact(ShotType::ForehandTopspin),
        Ratio::new(2, 3)
    );
    assert_eq!(
        cat.probability_exact(ShotType::BackhandUnderspin),
        Ratio::new(1, 3)
    );
    assert_eq!(
        cat.probability_exact(ShotType::ForehandVolley),
        Ratio::new(0, 1)
    );
}

#[test]
fn ladder_relaxes_the_least_important_feature_first() {
    let exact = [0u8, 0, 0, 0, 0];
    let slot = |f: Feature| match f {
        Feature::Opponent => 1,
        Feature::BallStart => 2,
        Feature::BallBounce => 3,
        Feature::Velocity => 4,
    };
    let p = Vec2::new(0.0, -10.0);
    for (i, f) in Feature::LADDER.into_iter().enumerate() {
        // One sample differing in `f` only, plus one for every more
        // important feature; the exact cell stays empty.
        let mut samples = Vec::new();
        for g in &Feature::LADDER[i..] {
            let mut k = exact;
            k[slot(*g)] = 1;
            samples.push(sample(
                k,
                ShotType::ForehandTopspin,
                20.0 + slot(*g) as f64,
                p,
                BASE,
            ));
        }
        let m = model(samples, 0.5);
        let look = m
            .marginalized_lookup(Kind::ANY_SHOT, CellKey(exact))
            .unwrap();
        let Level::Cell(r) = look.level else {
            panic!("pooled")
        };
        assert_eq!(r.k(), 1);
        assert_eq!(r.features().collect::<Vec<_>>(), vec![f]);
        assert_eq!(look.support, vec![0]);
        let mut key = exact;
        key[slot(f)] = ANY;
        assert_eq!(CellKey(exact).relaxed(r), CellKey(key));
    }
}

#[test]
fn kde_integrates_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for h in [0.25, 0.5, 1.0, 1.5] {
        let pts: Vec<Vec2> = (0..40)
            .map(|_| Vec2::new(rng.random_range(-4.0..4.0), rng.random_range(-12.0..-2.0)))
            .collect();
        let k = Kde2::new(pts, h).unwrap();
        let step = h / 8.0;
        let (x0, x1, y0, y1) = (
            -4.0 - 7.0 * h,
            4.0 + 7.0 * h,
            -12.0 - 7.0 * h,
            -2.0 + 7.0 * h,
        );
        let mut mass = 0.0;
        let mut y = y0;
        while y < y1 {
            let mut x = x0;
            while x < x1 {
                mass += k.density(&Vec2::new(x + step / 2.0, y + step / 2.0));
                x += step;
            }
            y += step;
        }
        mass *= step * step;
        assert!((mass - 1.0).abs() < 1e-3, "h={h}: {mass}");

        let speeds: Vec<f64> = (0..30).map(|_| rng.random_range(10.0..35.0)).collect();
        let k1 = Kde1::new(speeds, h * 2.0).unwrap();
        let step = h / 20.0;
        let mass: f64 = (0..((25.0 + 28.0 * h) / step) as usize)
            .map(|i| k1.density(&(10.0 - 14.0 * h + (i as f64 + 0.5) * step)) * step)
            .sum();
        assert!((mass - 1.0).abs() < 1e-3, "1d h={h}: {mass}");
    }
}

#[test]
fn draws_split_evenly_between_equal_clusters() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pts: Vec<Vec2> = (0..40)
        .map(|i| {
            let cx = if i % 2 == 0 { -2.5 } else { 2.5 };
            Vec2::new(
                cx + rng.random_range(-0.2..0.2),
                -9.0 + rng.random_range(-0.2..0.2),
            )
        })
        .collect();
    let k = Kde2::new(pts, 0.5).unwrap();
    let n = 10_000;
    let left = (0..n)
        .filter(|_| k.sample_above(&mut rng, 0.1, 64).value.x < 0.0)
        .count();
    let frac = left as f64 / n as f64;
    assert!((frac - 0.5).abs() < 0.05, "{frac}");
}

#[test]
fn mode_matches_the_dense_grid_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = rand_distr::Normal::new(0.0, 0.6).unwrap();
    for trial in 0..5 {
        let center = Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(11.0..13.0));
        let pts: Vec<Vec2> = (0..400)
            .map(|_| Vec2::new(center.x + rng.sample(normal), center.y + rng.sample(normal)))
            .collect();
        let k = Kde2::new(pts.clone(), 0.5).unwrap();
        let mut best = (center, f64::MIN);
        let cell = 0.1;
        for i in -40..=40 {
            for j in -40..=40 {
                let p = Vec2::new(center.x + i as f64 * cell, center.y + j as f64 * cell);
                let d = k.density(&p);
                if d > best.1 {
                    best = (p, d);
                }
            }
        }
        let mode = k.mode();
        assert!(
            (mode.x - best.0.x).abs() <= cell && (mode.y - best.0.y).abs() <= cell,
            "trial {trial}: {mode:?} vs {:?}",
            best.0
        );
        // The mode is the densest support point.
        let brute = pts.iter().map(|p| k.density(p)).fold(f64::MIN, f64::max);
        assert_eq!(k.density(&mode), brute);
    }
}

#[test]
fn shot_selection_never_emits_below_a_tenth_of_the_peak() {
    let db = common::standard_db(60, 12);
    let m = fit_models(&db, "b", &OpponentFilter::Any, &ModelConfig::default()).unwrap();
    let keys: Vec<CellKey> = m.cells().into_iter().map(|(k, _)| k).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    for n in 0..10_000 {
        let key = if n % 10 == 9 {
            CellKey([
                rng.random_range(0..6),
                rng.random_range(0..6),
                rng.random_range(0..6),
                rng.random_range(0..6),
                rng.random_range(0..5),
            ])
        } else {
            keys[rng.random_range(0..keys.len())]
        };
        let s = m.sample_shot_selection(key, [true; 7], &mut rng).unwrap();
        let v = m
            .velocity_density(
                &m.lookup_or_pool(Kind::Velocity(s.shot_type), key)
                    .unwrap()
                    .support,
            )
            .unwrap();
        let p = m
            .placement_density(
                &m.lookup_or_pool(Kind::Placement(s.shot_type), key)
                    .unwrap()
                    .support,
            )
            .unwrap();
        if v.density(&s.velocity) < 0.1 * v.peak().1 || p.density(&s.placement) < 0.1 * p.peak().1 {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn placements_stay_near_the_only_region_seen() {
    let court = CourtSpec::<f64>::default();
    let k = [1, 1, 1, 1, 1];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let band = court.band_width();
    let samples: Vec<Sample> = (0..30)
        .map(|_| {
            let x_b = Vec2::new(
                rng.random_range(-band / 2.0..band / 2.0),
                rng.random_range(-11.5..-court.depth_boundary()),
            );
            sample(k, ShotType::ForehandTopspin, 25.0, x_b, BASE)
        })
        .collect();
    let h = 0.75;
    let m = model(samples, h);
    let n = 2000;
    let inside = (0..n)
        .filter(|_| {
            let p = m
                .sample_shot_selection(CellKey(k), [true; 7], &mut rng)
                .unwrap()
                .placement;
            p.x.abs() <= band / 2.0 + 2.0 * h && p.y <= -court.depth_boundary() + 2.0 * h
        })
        .count();
    assert!(inside as f64 >= 0.95 * n as f64, "{inside}/{n}");
    let look = m
        .lookup_or_pool(Kind::Placement(ShotType::ForehandTopspin), CellKey(k))
        .unwrap();
    let mode = m.placement_density(&look.support).unwrap().mode();
    assert_eq!(
        region_of(mode, &court),
        region_of(Vec2::new(0.0, -11.0), &court)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relaxing_never_shrinks_support(
        keys in prop::collection::vec(prop::array::uniform5(0u8..3), 1..30),
        query in prop::array::uniform5(0u8..3),
    ) {
        let p = Vec2::new(0.0, -10.0);
        let m = model(keys.iter().map(|k| sample(*k, ShotType::ForehandTopspin, 20.0, p, BASE)).collect(), 0.5);
        // The player's own region is never relaxed.
        let Ok(look) = m.marginalized_lookup(Kind::ANY_SHOT, CellKey(query)) else {
            prop_assert!(keys.iter().all(|k| k[0] != query[0]));
            return Ok(());
        };
        let Level::Cell(r) = look.level else { panic!("pooled") };
        // Every sample in the support matches on the features kept.
        let relaxed = CellKey(query).relaxed(r);
        for &i in &look.support {
            prop_assert_eq!(CellKey(keys[i as usize]).relaxed(r), relaxed);
        }
        // No earlier rung had any support.
        for earlier in Relaxation::ladder().into_iter().take_while(|x| *x != r) {
            let q = CellKey(query).relaxed(earlier);
            prop_assert!(keys.iter().all(|k| CellKey(*k).relaxed(earlier) != q));
        }
    }

    #[test]
    fn categorical_fractions_sum_to_one(shots in prop::collection::vec(0usize..7, 1..40)) {
        let p = Vec2::new(0.0, -10.0);
        let k = [0, 0, 0, 0, 0];
        let m = model(shots.iter().map(|&s| sample(k, ShotType::ALL[s], 20.0, p, BASE)).collect(), 0.5);
        let cat = m.categorical(&m.marginalized_lookup(Kind::ANY_SHOT, CellKey(k)).unwrap().support);
        let sum: Ratio<u64> = ShotType::ALL.iter().map(|t| cat.probability_exact(*t)).sum();
        prop_assert_eq!(sum, Ratio::from_integer(1));
    }
}
