//! Benchmarks over workload-sized synthetic data: 78 countries, 30
//! panel years, 14 pillars — the shape of the shipped dataset.

use std::collections::BTreeMap;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaci_core::{
    build_pillar14, compute_gaci, fit_climate_model, item_analysis, minmax_normalize, rank,
    ClimateEffects, CountryId, HcType, NormalizationSpec, PanelObservation, PillarMatrix,
    N_PILLARS,
};

const N_COUNTRIES: usize = 78;
const N_YEARS: i32 = 30;

fn country(i: usize) -> CountryId {
    CountryId::new(&format!("Country {i:02}")).expect("static name is valid")
}

fn synthetic_panel() -> Vec<PanelObservation> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut panel = Vec::with_capacity(N_COUNTRIES * N_YEARS as usize);
    for i in 0..N_COUNTRIES {
        let level = rng.gen_range(40.0..140.0);
        for year in 1990..1990 + N_YEARS {
            let temp = rng.gen_range(-5.0..30.0);
            let prec = rng.gen_range(100.0..2500.0);
            let agtfp: f64 = level + 0.8 * temp + 0.002 * prec + rng.gen_range(-3.0..3.0);
            panel.push(
                PanelObservation::new(country(i), year, agtfp.max(1.0), temp, prec)
                    .expect("synthetic observation is in range"),
            );
        }
    }
    panel
}

fn synthetic_matrix() -> PillarMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let countries = (0..N_COUNTRIES).map(country).collect();
    let values = (0..N_COUNTRIES)
        .map(|_| {
            std::array::from_fn(|p| {
                if p + 1 == N_PILLARS {
                    rng.gen_range(-90.0..90.0)
                } else {
                    rng.gen_range(5.0..95.0)
                }
            })
        })
        .collect();
    PillarMatrix::new(countries, values).expect("synthetic matrix is valid")
}

fn synthetic_effects() -> ClimateEffects {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let named = (1..N_COUNTRIES)
        .map(|i| (country(i), rng.gen_range(-150.0..20.0)))
        .collect();
    ClimateEffects::new(country(0), rng.gen_range(-40.0..-10.0), named)
        .expect("synthetic effects are valid")
}

fn bench_normalize(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let values: Vec<f64> = (0..N_COUNTRIES)
        .map(|_| rng.gen_range(-200.0..50.0))
        .collect();
    let spec = NormalizationSpec::default();
    c.bench_function("minmax_normalize_78", |b| {
        b.iter(|| minmax_normalize(black_box(&values), &spec).unwrap())
    });
}

fn bench_fit(c: &mut Criterion) {
    let panel = synthetic_panel();
    c.bench_function("fit_climate_model_78x30_hc1", |b| {
        b.iter(|| fit_climate_model(black_box(&panel), None, HcType::Hc1, 0.05).unwrap())
    });
    c.bench_function("fit_climate_model_78x30_hc3", |b| {
        b.iter(|| fit_climate_model(black_box(&panel), None, HcType::Hc3, 0.05).unwrap())
    });
}

fn bench_pillar14(c: &mut Criterion) {
    let effects = synthetic_effects();
    let spec = NormalizationSpec::default();
    c.bench_function("build_pillar14_78", |b| {
        b.iter(|| build_pillar14(black_box(&effects), &spec).unwrap())
    });
}

fn bench_index(c: &mut Criterion) {
    let matrix = synthetic_matrix();
    c.bench_function("compute_and_rank_78x14", |b| {
        b.iter(|| {
            let scores = compute_gaci(black_box(&matrix));
            rank(&scores).unwrap()
        })
    });
}

fn bench_item_analysis(c: &mut Criterion) {
    let matrix = synthetic_matrix();
    let gaci: BTreeMap<CountryId, f64> = compute_gaci(&matrix);
    c.bench_function("item_analysis_78x15", |b| {
        b.iter(|| item_analysis(black_box(&matrix), &gaci).unwrap())
    });
}

criterion_group!(
    benches,
    bench_normalize,
    bench_fit,
    bench_pillar14,
    bench_index,
    bench_item_analysis
);
criterion_main!(benches);
