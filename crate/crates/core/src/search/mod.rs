//! Sampling, inertia catalogs, witness search, censuses and lemma checks.

pub mod catalog;
pub mod census;
pub mod sample;
pub mod verify;
pub mod witness;

pub use catalog::{family_arrays, known_catalog, CatalogEntry};
pub use census::{inertia_census, inertia_census_multi, Census, CensusClassification, CensusRow, RankSchedule};
pub use sample::{sample_kernel_state, sample_state, task_rng};
pub use verify::{verify_lemma, LemmaOutcome, VerificationReport, LEMMAS};
pub use witness::{target_inertia_search, Certification, SearchConfig, SearchStatus, WitnessResult};

/// Environment variable capping worker threads (0 or unset: automatic).
pub const THREADS_ENV: &str = "INERTIA_LAB_THREADS";

pub(crate) fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction")
}
