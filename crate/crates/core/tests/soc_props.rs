mod common;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use proptest::prelude::*;

use common::{oracle_unit_stocks, rel, treatments_of};
use sockg::datagen::{generate, GenConfig};
use sockg::soc::{grouped_mean_stock, profile_stock, DepthProfile, DepthWindow, GroupBy, SoilLayer};
use sockg::vocab;

fn day() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 5, 1).unwrap()
}

fn profile(layers: Vec<SoilLayer>) -> DepthProfile {
    DepthProfile::new("U", day(), layers)
}

/// Contiguous layers from 0 cm with the given thicknesses.
fn stack(parts: &[(f64, f64, f64)]) -> Vec<SoilLayer> {
    let mut top = 0.0;
    parts
        .iter()
        .map(|&(t, oc, bd)| {
            let l = SoilLayer::new(top, top + t, oc, bd);
            top += t;
            l
        })
        .collect()
}

fn layer_parts() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.5f64..30.0, 2.0f64..30.0, 0.9f64..1.7), 1..7)
}

/// A window `[u, l]` inside `[0, depth]`, from two fractions.
fn window_in(depth: f64, a: f64, b: f64) -> (f64, f64) {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let hi = hi.max(lo + 1e-3).min(1.0);
    let lo = lo.min(hi - 1e-3);
    (lo * depth, hi * depth)
}

fn stock(p: &DepthProfile, u: f64, l: f64) -> f64 {
    profile_stock(p, u, l).unwrap().stock_kgc_per_ha
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn micro_layer_oracle(
        parts in prop::collection::vec((1u32..20, 2.0f64..30.0, 0.9f64..1.7), 1..7),
        a in 0.0f64..1.0, b in 0.0f64..1.0,
    ) {
        let layers = stack(&parts.iter().map(|&(t, oc, bd)| (t as f64, oc, bd)).collect::<Vec<_>>());
        let depth = layers.last().unwrap().lower_cm as u32;
        let (mut u, mut l) = ((a * depth as f64) as u32, (b * depth as f64) as u32);
        if u > l { std::mem::swap(&mut u, &mut l); }
        if u == l { if l < depth { l += 1 } else { u -= 1 } }
        let mut brute = 0.0;
        for d in u..l {
            let mid = d as f64 + 0.5;
            let layer = layers.iter().find(|x| x.upper_cm <= mid && mid < x.lower_cm).unwrap();
            brute += layer.oc_gc_per_kg * layer.bd_g_per_cm3 * 1.0 * 100.0;
        }
        let got = stock(&profile(layers), u as f64, l as f64);
        prop_assert!(rel(got, brute) <= 1e-6, "{} vs {}", got, brute);
    }

    #[test]
    fn splitting_a_layer_is_neutral(parts in layer_parts(), which in any::<prop::sample::Index>(), at in 0.01f64..0.99, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let layers = stack(&parts);
        let depth = layers.last().unwrap().lower_cm;
        let (u, l) = window_in(depth, a, b);
        let i = which.index(layers.len());
        let x = &layers[i];
        let cut = x.upper_cm + at * (x.lower_cm - x.upper_cm);
        let mut split = layers.clone();
        split[i] = SoilLayer::new(x.upper_cm, cut, x.oc_gc_per_kg, x.bd_g_per_cm3);
        split.push(SoilLayer::new(cut, x.lower_cm, x.oc_gc_per_kg, x.bd_g_per_cm3));
        let whole = stock(&profile(layers), u, l);
        let halves = stock(&profile(split), u, l);
        prop_assert!(rel(whole, halves) <= 1e-9, "{} vs {}", whole, halves);
    }

    #[test]
    fn continuous_at_layer_boundaries(parts in prop::collection::vec((0.5f64..30.0, 2.0f64..30.0, 0.9f64..1.7), 2..7), which in any::<prop::sample::Index>()) {
        let layers = stack(&parts);
        let b = layers[which.index(layers.len() - 1)].lower_cm;
        let p = profile(layers.clone());
        let exact = stock(&p, 0.0, b);
        let density = layers.iter().map(|l| l.oc_gc_per_kg * l.bd_g_per_cm3 * 100.0).fold(0.0, f64::max);
        for eps in [1e-1, 1e-3, 1e-6] {
            let near = stock(&p, 0.0, b - eps);
            prop_assert!(near <= exact);
            prop_assert!(exact - near <= density * eps * (1.0 + 1e-9) + exact * 1e-12, "eps {}: {} vs {}", eps, near, exact);
        }
    }

    #[test]
    fn more_carbon_never_lowers_stock(parts in layer_parts(), which in any::<prop::sample::Index>(), bump in 0.0f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let layers = stack(&parts);
        let (u, l) = window_in(layers.last().unwrap().lower_cm, a, b);
        let mut richer = layers.clone();
        richer[which.index(layers.len())].oc_gc_per_kg += bump;
        prop_assert!(stock(&profile(richer), u, l) >= stock(&profile(layers), u, l));
    }

    #[test]
    fn stock_scales_with_carbon(parts in layer_parts(), k in 0.01f64..100.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let layers = stack(&parts);
        let (u, l) = window_in(layers.last().unwrap().lower_cm, a, b);
        let scaled: Vec<SoilLayer> = layers
            .iter()
            .map(|x| SoilLayer::new(x.upper_cm, x.lower_cm, x.oc_gc_per_kg * k, x.bd_g_per_cm3))
            .collect();
        let base = stock(&profile(layers), u, l);
        prop_assert!(rel(stock(&profile(scaled), u, l), k * base) <= 1e-9);
    }
}

fn grouped(cfg: &GenConfig, scale: Option<f64>) -> BTreeMap<String, f64> {
    let mut generated = generate(cfg).unwrap();
    if let Some(k) = scale {
        let t = generated.tables.iter_mut().find(|t| t.tab_name == "chemical").unwrap();
        let c = t.columns.iter().position(|h| h == "SOC gC/kg").unwrap();
        for row in &mut t.rows {
            if let Ok(v) = row[c].parse::<f64>() {
                row[c] = format!("{}", v * k);
            }
        }
    }
    let g = common::graph_of(&generated);
    grouped_mean_stock(&g, GroupBy::Treatment, DepthWindow::default())
        .unwrap()
        .into_iter()
        .map(|(k, v)| (k, v.mean_stock_kgc_per_ha))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn grouped_means_scale_with_carbon(seed in 0u64..1000, k in 0.1f64..10.0) {
        let cfg = GenConfig { seed, n_sites: 1, ..GenConfig::default() };
        let base = grouped(&cfg, None);
        let scaled = grouped(&cfg, Some(k));
        prop_assert_eq!(base.len(), scaled.len());
        for (t, m) in &base {
            prop_assert!(rel(scaled[t], k * m) <= 1e-9);
        }
    }

    #[test]
    fn grouped_means_equal_enumeration(seed in 0u64..1000, missing in 0.0f64..0.2, shallow in 0.0f64..0.5) {
        let cfg = GenConfig { seed, n_sites: 1, missing_fraction: missing, shallow_fraction: shallow, ..GenConfig::default() };
        let (_, g) = common::synthetic(&cfg);
        let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for u in g.ids_of(vocab::EXPERIMENTAL_UNIT) {
            let stocks = oracle_unit_stocks(&g, u, 0.0, 30.0);
            for t in treatments_of(&g, u) {
                groups.entry(g.entity(t).uid.clone()).or_default().extend(&stocks);
            }
        }
        groups.retain(|_, v| !v.is_empty());
        let got = grouped_mean_stock(&g, GroupBy::Treatment, DepthWindow::default()).unwrap();
        prop_assert_eq!(got.len(), groups.len());
        for (t, v) in groups {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            prop_assert_eq!(got[&t].n_samples, v.len());
            prop_assert!(rel(got[&t].mean_stock_kgc_per_ha, mean) <= 1e-9);
        }
    }
}

#[test]
fn oracle_agrees_on_irregular_schemes() {
    for scheme in [
        vec![(0.0, 7.5), (7.5, 22.0), (22.0, 31.0)],
        vec![(0.0, 30.0)],
        vec![(0.0, 5.0), (5.0, 10.0), (10.0, 20.0), (20.0, 29.0), (29.0, 100.0)],
    ] {
        let (_, g) = common::synthetic(&GenConfig {
            depth_scheme: scheme.clone(),
            ..GenConfig::default()
        });
        let got = grouped_mean_stock(&g, GroupBy::Site, DepthWindow::default()).unwrap();
        let total: usize = got.values().map(|a| a.n_samples).sum();
        let brute: usize = g
            .ids_of(vocab::EXPERIMENTAL_UNIT)
            .map(|u| oracle_unit_stocks(&g, u, 0.0, 30.0).len())
            .sum();
        assert_eq!(total, brute, "{scheme:?}");
    }
}
