//! Soil organic carbon stock over a depth window.
//!
//! Per layer, stock (kgC/ha) = OC (gC/kg) × BD (g/cm³) × thickness (cm) × 100.
//! Layers are summed over the window; a layer crossing a window boundary
//! contributes the proportional share of its thickness inside the window.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::graph::{EntityId, KnowledgeGraph};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoilLayer {
    pub upper_cm: f64,
    pub lower_cm: f64,
    #[serde(rename = "oc_gC_per_kg")]
    pub oc_gc_per_kg: f64,
    pub bd_g_per_cm3: f64,
}

impl SoilLayer {
    pub fn new(upper_cm: f64, lower_cm: f64, oc_gc_per_kg: f64, bd_g_per_cm3: f64) -> Self {
        SoilLayer {
            upper_cm,
            lower_cm,
            oc_gc_per_kg,
            bd_g_per_cm3,
        }
    }

    pub fn is_valid(&self) -> bool {
        let finite = [self.upper_cm, self.lower_cm, self.oc_gc_per_kg, self.bd_g_per_cm3]
            .iter()
            .all(|v| v.is_finite());
        finite && 0.0 <= self.upper_cm && self.upper_cm < self.lower_cm && self.oc_gc_per_kg >= 0.0 && self.bd_g_per_cm3 > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthProfile {
    pub unit_uid: String,
    #[serde(skip)]
    pub unit: EntityId,
    pub date: NaiveDate,
    pub layers: Vec<SoilLayer>,
}

impl DepthProfile {
    pub fn new(unit_uid: impl Into<String>, date: NaiveDate, mut layers: Vec<SoilLayer>) -> Self {
        layers.sort_by(|a, b| a.upper_cm.total_cmp(&b.upper_cm).then(a.lower_cm.total_cmp(&b.lower_cm)));
        DepthProfile {
            unit_uid: unit_uid.into(),
            unit: 0,
            date,
            layers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StockResult {
    #[serde(rename = "stock_kgC_per_ha")]
    pub stock_kgc_per_ha: f64,
    pub interpolated: bool,
    pub layers_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    #[serde(rename = "mean_stock_kgC_per_ha")]
    pub mean_stock_kgc_per_ha: f64,
    pub n_samples: usize,
    pub n_units: usize,
}

/// A depth interval `[upper_cm, lower_cm]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthWindow {
    pub upper_cm: f64,
    pub lower_cm: f64,
}

impl DepthWindow {
    pub fn new(upper_cm: f64, lower_cm: f64) -> Result<Self, SocError> {
        if !(upper_cm.is_finite() && lower_cm.is_finite() && 0.0 <= upper_cm && upper_cm < lower_cm) {
            return Err(SocError::InvalidWindow { upper_cm, lower_cm });
        }
        Ok(DepthWindow { upper_cm, lower_cm })
    }
}

impl Default for DepthWindow {
    fn default() -> Self {
        DepthWindow {
            upper_cm: 0.0,
            lower_cm: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SocError {
    #[error("effective lower depth {effective_lower_cm} outside layer {upper_cm}-{lower_cm} cm")]
    EffectiveLowerOutOfRange {
        upper_cm: f64,
        lower_cm: f64,
        effective_lower_cm: f64,
    },
    #[error("invalid window {upper_cm}-{lower_cm} cm")]
    InvalidWindow { upper_cm: f64, lower_cm: f64 },
    #[error("profile has no layers")]
    EmptyProfile,
    #[error("profile reaches {reached_cm} cm, window ends at {target_lower_cm} cm")]
    TooShallow { reached_cm: f64, target_lower_cm: f64 },
    #[error("profile starts at {first_upper_cm} cm, below window top {target_upper_cm} cm")]
    StartsBelowWindow { first_upper_cm: f64, target_upper_cm: f64 },
    #[error("layers leave a gap at {at_cm} cm inside the window")]
    GapInWindow { at_cm: f64 },
    #[error("unknown grouping `{0}`")]
    UnknownGroupBy(String),
}

/// Stock of `l` from its upper bound down to `effective_lower_cm`.
pub fn layer_stock(l: &SoilLayer, effective_lower_cm: f64) -> Result<f64, SocError> {
    if !(l.upper_cm <= effective_lower_cm && effective_lower_cm <= l.lower_cm) {
        return Err(SocError::EffectiveLowerOutOfRange {
            upper_cm: l.upper_cm,
            lower_cm: l.lower_cm,
            effective_lower_cm,
        });
    }
    Ok(l.oc_gc_per_kg * l.bd_g_per_cm3 * (effective_lower_cm - l.upper_cm) * 100.0)
}

/// Sums the stock of `p` over the window. Checks run in the order
/// TooShallow, StartsBelowWindow, GapInWindow.
pub fn profile_stock(p: &DepthProfile, target_upper_cm: f64, target_lower_cm: f64) -> Result<StockResult, SocError> {
    let w = DepthWindow::new(target_upper_cm, target_lower_cm)?;
    let first = p.layers.first().ok_or(SocError::EmptyProfile)?;
    let reached = p.layers.iter().map(|l| l.lower_cm).fold(f64::NEG_INFINITY, f64::max);
    if reached < w.lower_cm {
        return Err(SocError::TooShallow {
            reached_cm: reached,
            target_lower_cm: w.lower_cm,
        });
    }
    if first.upper_cm > w.upper_cm {
        return Err(SocError::StartsBelowWindow {
            first_upper_cm: first.upper_cm,
            target_upper_cm: w.upper_cm,
        });
    }
    let mut cursor = w.upper_cm;
    let mut total = 0.0;
    let mut interpolated = false;
    let mut used = 0;
    for l in &p.layers {
        if l.lower_cm <= w.upper_cm || l.upper_cm >= w.lower_cm {
            continue;
        }
        let top = l.upper_cm.max(w.upper_cm);
        if top != cursor {
            return Err(SocError::GapInWindow { at_cm: cursor });
        }
        let bottom = l.lower_cm.min(w.lower_cm);
        interpolated |= top != l.upper_cm || bottom != l.lower_cm;
        let clipped = SoilLayer { upper_cm: top, ..*l };
        total += layer_stock(&clipped, bottom)?;
        used += 1;
        cursor = bottom;
    }
    if cursor != w.lower_cm {
        return Err(SocError::GapInWindow { at_cm: cursor });
    }
    Ok(StockResult {
        stock_kgc_per_ha: total,
        interpolated,
        layers_used: used,
    })
}

/// Why a unit/date produced no profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedProfile {
    pub unit_uid: String,
    pub date: NaiveDate,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AssemblyReport {
    /// Chemical or physical layers with no partner at the same date and depth.
    pub unmatched_layers: usize,
    /// Samples lacking a date, a depth bound, or the measured value.
    pub incomplete_samples: usize,
    /// Joined layers violating the layer invariants.
    pub invalid_layers: usize,
    pub rejected: Vec<RejectedProfile>,
}

type LayerKey = (NaiveDate, u64, u64);

fn sample_layers(
    g: &KnowledgeGraph,
    unit: EntityId,
    kind: vocab::SampleKind,
    measure: &str,
    incomplete: &mut usize,
) -> BTreeMap<LayerKey, Vec<f64>> {
    let mut out: BTreeMap<LayerKey, Vec<f64>> = BTreeMap::new();
    for s in g.objects(unit, kind.link) {
        let e = g.entity(s);
        let fields = (
            e.get(kind.date).and_then(|v| v.as_date()),
            e.get(kind.upper).and_then(|v| v.as_f64()),
            e.get(kind.lower).and_then(|v| v.as_f64()),
            e.get(measure).and_then(|v| v.as_f64()),
        );
        match fields {
            (Some(d), Some(u), Some(l), Some(v)) => out.entry((d, (u + 0.0).to_bits(), (l + 0.0).to_bits())).or_default().push(v),
            _ => *incomplete += 1,
        }
    }
    out
}

/// Joins chemical (OC) and physical (BD) layers of each unit on exact date
/// and depth interval. Results are ordered by unit id, then date.
pub fn assemble_profiles(g: &KnowledgeGraph, units: &[EntityId]) -> (Vec<DepthProfile>, AssemblyReport) {
    let mut report = AssemblyReport::default();
    let mut profiles = Vec::new();
    let mut units = units.to_vec();
    units.sort_unstable();
    units.dedup();
    for unit in units {
        let chem = sample_layers(g, unit, vocab::CHEMICAL, vocab::ORGANIC_CARBON, &mut report.incomplete_samples);
        let phys = sample_layers(g, unit, vocab::PHYSICAL, vocab::BULK_DENSITY, &mut report.incomplete_samples);
        let mut by_date: BTreeMap<NaiveDate, Vec<SoilLayer>> = BTreeMap::new();
        for (key, ocs) in &chem {
            let Some(bds) = phys.get(key) else {
                report.unmatched_layers += ocs.len();
                continue;
            };
            let (upper, lower) = (f64::from_bits(key.1), f64::from_bits(key.2));
            for &oc in ocs {
                for &bd in bds {
                    let l = SoilLayer::new(upper, lower, oc, bd);
                    if l.is_valid() {
                        by_date.entry(key.0).or_default().push(l);
                    } else {
                        report.invalid_layers += 1;
                    }
                }
            }
        }
        report.unmatched_layers += phys.iter().filter(|(k, _)| !chem.contains_key(k)).map(|(_, v)| v.len()).sum::<usize>();
        let unit_uid = &g.entity(unit).uid;
        for (date, layers) in by_date {
            let mut p = DepthProfile::new(unit_uid.clone(), date, layers);
            p.unit = unit;
            if let Some(w) = p.layers.windows(2).find(|w| w[0].lower_cm > w[1].upper_cm) {
                report.rejected.push(RejectedProfile {
                    unit_uid: unit_uid.clone(),
                    date,
                    reason: format!(
                        "layers {}-{} and {}-{} cm overlap",
                        w[0].upper_cm, w[0].lower_cm, w[1].upper_cm, w[1].lower_cm
                    ),
                });
                continue;
            }
            profiles.push(p);
        }
    }
    (profiles, report)
}

/// A profile that passed every window check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileStock {
    pub unit: EntityId,
    pub unit_uid: String,
    pub date: NaiveDate,
    pub result: StockResult,
}

/// Filter counts from evaluating profiles over a window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FilterCounts {
    pub too_shallow: usize,
    pub starts_below_window: usize,
    pub gap_in_window: usize,
}

/// Evaluates every profile; failures are counted, not propagated.
pub fn evaluate_profiles(profiles: &[DepthProfile], window: DepthWindow) -> (Vec<ProfileStock>, FilterCounts) {
    let mut counts = FilterCounts::default();
    let mut out = Vec::with_capacity(profiles.len());
    for p in profiles {
        match profile_stock(p, window.upper_cm, window.lower_cm) {
            Ok(result) => out.push(ProfileStock {
                unit: p.unit,
                unit_uid: p.unit_uid.clone(),
                date: p.date,
                result,
            }),
            Err(SocError::TooShallow { .. } | SocError::EmptyProfile) => counts.too_shallow += 1,
            Err(SocError::StartsBelowWindow { .. }) => counts.starts_below_window += 1,
            Err(_) => counts.gap_in_window += 1,
        }
    }
    (out, counts)
}

/// Unweighted mean over profile stocks; `None` when empty.
pub fn aggregate<'a>(stocks: impl IntoIterator<Item = &'a ProfileStock>) -> Option<AggregateResult> {
    let mut sum = 0.0;
    let mut n = 0;
    let mut units = BTreeSet::new();
    for s in stocks {
        sum += s.result.stock_kgc_per_ha;
        n += 1;
        units.insert(s.unit);
    }
    (n > 0).then(|| AggregateResult {
        mean_stock_kgc_per_ha: sum / n as f64,
        n_samples: n,
        n_units: units.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    Treatment,
    Field,
    Site,
}

impl GroupBy {
    pub fn class(self) -> &'static str {
        match self {
            GroupBy::Treatment => vocab::TREATMENT,
            GroupBy::Field => vocab::FIELD,
            GroupBy::Site => vocab::SITE,
        }
    }
}

impl FromStr for GroupBy {
    type Err = SocError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "treatment" => Ok(GroupBy::Treatment),
            "field" => Ok(GroupBy::Field),
            "site" => Ok(GroupBy::Site),
            other => Err(SocError::UnknownGroupBy(other.to_string())),
        }
    }
}

impl fmt::Display for GroupBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupBy::Treatment => "treatment",
            GroupBy::Field => "field",
            GroupBy::Site => "site",
        })
    }
}

/// Object-property chain from an experimental unit to entities of `class`.
pub fn unit_path(g: &KnowledgeGraph, class: &str) -> Option<Vec<String>> {
    g.ontology()
        .property_path(vocab::EXPERIMENTAL_UNIT, class)
        .map(|p| p.into_iter().map(|op| op.name.clone()).collect())
}

/// Mean window stock per group uid. Groups without a surviving profile are
/// omitted.
pub fn grouped_mean_stock(
    g: &KnowledgeGraph,
    group_by: GroupBy,
    window: DepthWindow,
) -> Result<BTreeMap<String, AggregateResult>, SocError> {
    let path = unit_path(g, group_by.class()).ok_or_else(|| SocError::UnknownGroupBy(group_by.to_string()))?;
    let units: Vec<EntityId> = g.ids_of(vocab::EXPERIMENTAL_UNIT).collect();
    let (profiles, _) = assemble_profiles(g, &units);
    let (stocks, _) = evaluate_profiles(&profiles, window);
    let mut groups: BTreeMap<String, Vec<&ProfileStock>> = BTreeMap::new();
    for s in &stocks {
        for grp in g.follow(s.unit, &path) {
            groups.entry(g.entity(grp).uid.clone()).or_default().push(s);
        }
    }
    Ok(groups
        .into_iter()
        .filter_map(|(k, v)| aggregate(v).map(|a| (k, a)))
        .collect())
}
