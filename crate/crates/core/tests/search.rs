use inertia_lab::linalg::eigvalsh;
use inertia_lab::ptrans::{inertia, partial_transpose, BipartiteDims, Inertia};
use inertia_lab::search::{
    inertia_census, known_catalog, sample_state, target_inertia_search, verify_lemma, RankSchedule, SearchConfig,
    SearchStatus, THREADS_ENV,
};

fn dims(m: usize, n: usize) -> BipartiteDims {
    BipartiteDims::new(m, n).unwrap()
}

fn recertify(config: &SearchConfig, witness: &inertia_lab::ComplexMatrix) {
    let scale = witness.frobenius_norm();
    assert!(eigvalsh(witness).unwrap()[0] >= -1e-10 * scale);
    let pt = partial_transpose(witness, config.dims).unwrap();
    let mu = eigvalsh(&pt).unwrap();
    let pscale = pt.frobenius_norm();
    assert_eq!(inertia(&pt, config.zero_tol).unwrap(), config.target);
    let t = config.target;
    for (i, x) in mu.iter().enumerate() {
        if i < t.neg || i >= t.neg + t.zero {
            assert!(x.abs() > config.margin * pscale, "nonzero slot {i} = {x}");
        } else {
            assert!(x.abs() <= config.zero_tol * pscale, "zero slot {i} = {x}");
        }
    }
}

#[test]
fn two_by_three_catalog_is_reproduced() {
    let d = dims(2, 3);
    for target in known_catalog(d).known_members {
        let config = SearchConfig::new(d, target);
        let r = target_inertia_search(&config).unwrap();
        assert_eq!(r.status, SearchStatus::Found, "{target}");
        recertify(&config, r.witness.as_ref().unwrap());
    }
}

#[test]
fn qutrit_witness_for_four_negatives() {
    let config = SearchConfig::new(dims(3, 3), Inertia::new(4, 0, 5));
    let r = target_inertia_search(&config).unwrap();
    assert!(r.found());
    recertify(&config, r.witness.as_ref().unwrap());
}

#[test]
fn excluded_target_is_not_found_in_a_short_run() {
    let mut config = SearchConfig::new(dims(3, 3), Inertia::new(4, 1, 4));
    config.restarts = 3;
    let r = target_inertia_search(&config).unwrap();
    assert_eq!(r.status, SearchStatus::NotFound);
    assert!(r.witness.is_none());
    assert!(r.residual > 100.0 * config.certification_threshold());
}

#[test]
fn identical_configs_give_identical_results() {
    let mut config = SearchConfig::new(dims(3, 3), Inertia::new(2, 1, 6));
    config.seed = 17;
    let a = target_inertia_search(&config).unwrap();
    let b = target_inertia_search(&config).unwrap();
    assert_eq!(a, b);
    assert_eq!(sample_state(dims(3, 4), 5, 3).unwrap(), sample_state(dims(3, 4), 5, 3).unwrap());
}

#[test]
fn thread_count_does_not_change_results() {
    let d = dims(3, 3);
    let mut config = SearchConfig::new(d, Inertia::new(1, 4, 4));
    config.seed = 2;
    let run = || {
        (
            target_inertia_search(&config).unwrap(),
            inertia_census(d, 3000, &RankSchedule::mixed(d), 4, 1e-9).unwrap(),
            verify_lemma("all", 20, 6).unwrap(),
        )
    };
    std::env::set_var(THREADS_ENV, "1");
    let serial = run();
    std::env::set_var(THREADS_ENV, "3");
    let parallel = run();
    std::env::remove_var(THREADS_ENV);
    assert_eq!(serial, parallel);
}

#[test]
fn qutrit_census_stays_inside_the_catalog() {
    let d = dims(3, 3);
    let census = inertia_census(d, 20_000, &RankSchedule::mixed(d), 11, 1e-9).unwrap();
    let c = census.classify(&known_catalog(d));
    assert!(!c.flagged(), "{c:?}");
    let full = inertia_census(d, 5_000, &RankSchedule::full(d), 12, 1e-9).unwrap();
    for row in full.rows.iter().filter(|r| r.neg > 0) {
        assert!(row.zero == 0 && (1..=4).contains(&row.neg), "{row:?}");
    }
}
