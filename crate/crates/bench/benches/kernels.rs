use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qsource_bench::{atom_laser, field_points, o_minus};
use qsource_core::airy::{airy_all, airy_scaled};
use qsource_core::green::{green_oracle_scaled, green_scaled, ORACLE_DELTA0};
use qsource_core::scenarios::{detector_image, linspace};
use qsource_core::sources::{detector_flux, psi_gauss_quadrature, sum_rule_check, total_current_gauss, SourceModel};
use qsource_core::{ScaledEnergy, ScaledPoint};

fn airy(c: &mut Criterion) {
    let xs = linspace(-60.0, 60.0, 256).unwrap();
    c.bench_function("airy_all/256 points", |b| {
        b.iter(|| xs.iter().map(|&x| airy_all(black_box(x)).unwrap().ai).sum::<f64>())
    });
    c.bench_function("airy_scaled/256 points", |b| {
        b.iter(|| {
            xs.iter()
                .map(|&x| airy_scaled(black_box(3.0 * x)).unwrap().ai)
                .sum::<f64>()
        })
    });
}

fn green(c: &mut Criterion) {
    let pts = field_points();
    let origin = ScaledPoint::new(0.0, 0.0, 0.0);
    c.bench_function("green_scaled/16 points", |b| {
        b.iter(|| {
            pts.iter()
                .map(|p| green_scaled(black_box(p), &origin, ScaledEnergy(-2.0)).unwrap().norm())
                .sum::<f64>()
        })
    });
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("green_oracle_scaled/16 points", |b| {
        b.iter(|| {
            pts.iter()
                .map(|p| {
                    green_oracle_scaled(black_box(p), &origin, ScaledEnergy(-2.0), ORACLE_DELTA0)
                        .unwrap()
                        .0
                        .norm()
                })
                .sum::<f64>()
        })
    });
    g.finish();
}

fn currents(c: &mut Criterion) {
    let (p, sys, src) = atom_laser(0.4e-6);
    let e = p.energy_of(&sys, p.nu_profile);
    c.bench_function("total_current_gauss", |b| {
        b.iter(|| total_current_gauss(&sys, black_box(&src), e).unwrap())
    });
    let mut g = c.benchmark_group("integrals");
    g.sample_size(10);
    g.bench_function("sum_rule_check/a=0.4um", |b| {
        b.iter(|| sum_rule_check(&sys, &SourceModel::Gaussian(src), (-1e-29, 1e-29), 1e-6).unwrap())
    });
    let (o, osys) = o_minus();
    let osrc = SourceModel::Point(o.source());
    g.bench_function("detector_flux/O-", |b| {
        b.iter(|| detector_flux(&osys, &osrc, black_box(o.z), o.energy).unwrap())
    });
    g.bench_function("psi_gauss_quadrature", |b| {
        b.iter(|| psi_gauss_quadrature(&sys, &src, black_box([0.3e-6, 0.0, 0.2e-6]), e).unwrap())
    });
    g.bench_function("detector_image/O- 128px", |b| {
        b.iter(|| detector_image(&osys, &osrc, o.energy, o.z, 1e-3, black_box(128)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, airy, green, currents);
criterion_main!(benches);
