use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vfm_core::covering::{
    containment_lemma_check, covering_certificate, greedy_disjoint, is_maximal_disjoint, sample_family, AdmissibleFamily,
    FamilySampler,
};
use vfm_core::operators::{tilde_maximal, weak_type_sup, CandidateFamily, FamilySpec, OrientationRule, WidthRule};

#[test]
fn five_hundred_members_selection_is_maximal() {
    let sampler = FamilySampler { max_members: 500, max_attempts: 20_000, ..FamilySampler::default() };
    let fam = sample_family(&sampler, 0.1, 0.009, 500).unwrap();
    assert!(fam.len() > 300, "{}", fam.len());
    let sel = greedy_disjoint(&fam);
    assert!(is_maximal_disjoint(&fam, &sel.selected));
    for (j, &w) in sel.witness.iter().enumerate() {
        let (m, s) = (&fam.members()[j], &fam.members()[w]);
        assert!(s.rect.length >= m.rect.length);
        assert!(!s.population.is_disjoint(&m.population).unwrap());
    }
}

#[test]
fn selection_is_invariant_under_permutation_of_equal_keys() {
    let base = sample_family(&FamilySampler::default(), 0.3, 0.005, 9).unwrap();
    // duplicate every rectangle so that each sort key appears twice
    let mut rects = base.rects();
    rects.extend(base.rects());
    let fam = AdmissibleFamily::new(base.field().clone(), base.f().clone(), rects.clone(), 0.3, 0.005, base.lambda()).unwrap();
    let n = base.len();
    let chosen: Vec<_> = greedy_disjoint(&fam).selected.iter().map(|&i| fam.members()[i].rect).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let mut perm: Vec<usize> = (0..2 * n).collect();
        perm.shuffle(&mut rng);
        let shuffled = AdmissibleFamily::new(
            base.field().clone(),
            base.f().clone(),
            perm.iter().map(|&i| rects[i]).collect(),
            0.3,
            0.005,
            base.lambda(),
        )
        .unwrap();
        let got: Vec<_> = greedy_disjoint(&shuffled).selected.iter().map(|&i| shuffled.members()[i].rect).collect();
        assert_eq!(got, chosen);
    }
}

#[test]
fn ten_thousand_intersecting_pairs_satisfy_the_lemma() {
    let mut pairs = 0usize;
    let mut failures = Vec::new();
    let mut seed = 0;
    while pairs < 10_000 {
        let theta = if seed % 2 == 0 { 0.005 } else { 0.009 };
        let fam = sample_family(&FamilySampler::default(), 0.1, theta, 1000 + seed).unwrap();
        let m = fam.members();
        for j in 0..m.len() {
            for i in 0..m.len() {
                if i == j || m[j].rect.length > m[i].rect.length {
                    continue;
                }
                let Some(z0) = m[j].population.first_common(&m[i].population).unwrap() else { continue };
                let e = containment_lemma_check(fam.field(), theta, (j, &m[j]), (i, &m[i]), z0).unwrap();
                pairs += 1;
                assert!(e.checks[3], "containment failed for {e:?}");
                if !e.passed() {
                    failures.push(e);
                }
            }
        }
        seed += 1;
    }
    assert!(failures.is_empty(), "{} of {pairs} pairs failed (i)-(iii): {:?}", failures.len(), failures.first());
}

#[test]
fn certificates_pass_across_the_parameter_grid() {
    let start = Instant::now();
    let sampler = FamilySampler::default();
    let mut count = 0;
    for delta in [0.1, 0.3, 0.5] {
        for theta in [0.005, 0.009] {
            for seed in 0..4 {
                let fam = sample_family(&sampler, delta, theta, seed).unwrap();
                let cert = covering_certificate(&fam).unwrap();
                let c = &cert.chain;
                assert!(c.k <= c.sum_rp && c.sum_rp <= c.sum_r100 && c.sum_r100 <= c.sum_v_over_delta);
                assert!(c.sum_v_over_delta <= c.sum_f_over_delta_lambda && c.sum_f_over_delta_lambda <= c.bound);
                assert!(cert.containment.iter().all(|c| c.slack >= -1e-12));
                count += 1;
            }
        }
    }
    eprintln!("{count} certificates in {:?}", start.elapsed());
}

#[test]
fn certificate_is_deterministic_and_serializes() {
    let fam = sample_family(&FamilySampler::default(), 0.5, 0.009, 7).unwrap();
    let a = covering_certificate(&fam).unwrap();
    let b = covering_certificate(&sample_family(&FamilySampler::default(), 0.5, 0.009, 7).unwrap()).unwrap();
    assert_eq!(a, b);
    let json = serde_json::to_value(&a).unwrap();
    for key in ["K", "sumRp", "sumR100", "sumV_over_delta", "bound"] {
        assert!(json["chain"][key].is_number(), "{key}");
    }
    assert!(json["selected"].is_array() && json["pair_evidence"].is_array());
}

#[test]
fn weak_type_of_tilde_below_constant_where_certified() {
    // the candidate family of the tilde operator certified through the covering pipeline
    let field = vfm_core::covering::far_rotation_field();
    let grid = vfm_core::covering::far_rotation_grid(128).unwrap();
    for theta in [0.005, 0.009] {
        let spec = FamilySpec {
            stride: 16,
            orientation: OrientationRule::FieldAligned { count: 3, spread: theta / 2.0 },
            lengths: vec![0.3, 0.6],
            width_rule: WidthRule::Eccentricity { theta },
            caps: None,
            limit: None,
            seed: 0,
        };
        let cands = CandidateFamily::build(&field, &grid, &spec).unwrap();
        let mut f = vfm_core::operators::GridFunction::zeros(grid);
        f.values[grid.index(64, 64)] = 1.0;
        f.values[grid.index(20, 100)] = 1.0;
        for delta in [0.1, 0.5] {
            let mf = tilde_maximal(&f, &cands, delta, theta).unwrap().values;
            let sup = weak_type_sup(&mf, &f).unwrap();
            assert!(sup <= 100.0 / delta, "{sup}");
        }
    }
}
