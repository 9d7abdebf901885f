//! Deterministic synthetic workbooks shaped like the AgCROS export, with a
//! ground-truth ledger computed while the cells are written.
//!
//! The ledger's stock arithmetic is deliberately separate from [`crate::soc`]:
//! it works from coverage sums rather than walking layers, so agreement
//! between the two is evidence rather than tautology.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::GraphStats;
use crate::ingest::{write_mapping, write_tables, IngestError, LinkSpec, MappingDictionary, RawTable, TabMapping};
use crate::soc::{AggregateResult, DepthWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub n_sites: usize,
    pub fields_per_site: usize,
    pub units_per_field: usize,
    pub n_treatments: usize,
    pub start_year: i32,
    pub years: usize,
    pub samples_per_unit_per_year: usize,
    /// `(upper, lower)` cm pairs, ascending and non-overlapping.
    pub depth_scheme: Vec<(f64, f64)>,
    pub shallow_fraction: f64,
    pub missing_fraction: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 42,
            n_sites: 2,
            fields_per_site: 5,
            units_per_field: 5,
            n_treatments: 12,
            start_year: 2010,
            years: 5,
            samples_per_unit_per_year: 1,
            depth_scheme: vec![(0.0, 10.0), (10.0, 15.0), (15.0, 40.0), (40.0, 60.0)],
            shallow_fraction: 0.1,
            missing_fraction: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] IngestError),
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Config(m.to_string()));
        for (name, f) in [("shallowFraction", self.shallow_fraction), ("missingFraction", self.missing_fraction)] {
            if !(0.0..=1.0).contains(&f) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if self.n_sites == 0 || self.fields_per_site == 0 || self.units_per_field == 0 {
            return bad("nSites, fieldsPerSite and unitsPerField must be positive");
        }
        if self.n_treatments == 0 || self.years == 0 {
            return bad("nTreatments and years must be positive");
        }
        if !(1..=12).contains(&self.samples_per_unit_per_year) {
            return bad("samplesPerUnitPerYear must lie in 1..=12");
        }
        if self.n_sites > 99 || self.fields_per_site > 99 || self.units_per_field > 999 || self.n_treatments > 999 {
            return bad("counts exceed identifier width");
        }
        if self.depth_scheme.is_empty() {
            return bad("depthScheme is empty");
        }
        for (i, &(u, l)) in self.depth_scheme.iter().enumerate() {
            if !(u.is_finite() && l.is_finite() && 0.0 <= u && u < l) {
                return bad("depth layers need 0 <= upper < lower");
            }
            if i > 0 && self.depth_scheme[i - 1].1 > u {
                return bad("depthScheme must be ascending and non-overlapping");
            }
        }
        Ok(())
    }
}

/// N rate (kg N/ha) for a crop and nitrogen level.
pub fn applied_nitrogen(crop: &str, level: &str) -> Option<f64> {
    let (low, high) = match crop.to_ascii_lowercase().as_str() {
        "corn" | "sorghum" => (33.0, 67.0),
        "soybean" | "oat+clover" => (90.0, 180.0),
        _ => return None,
    };
    match level {
        "0" => Some(0.0),
        "low" => Some(low),
        "high" => Some(high),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroundTruthLedger {
    pub seed: u64,
    pub window: DepthWindow,
    pub stats: GraphStats,
    pub rows_per_tab: BTreeMap<String, usize>,
    pub missing_cells: usize,
    pub empty_cells: usize,
    /// Profiles with at least one layer carrying both OC and BD.
    pub profiles: usize,
    pub too_shallow: usize,
    pub starts_below_window: usize,
    pub gap_in_window: usize,
    pub surviving: usize,
    pub mean_stock_by_treatment: BTreeMap<String, AggregateResult>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub tables: Vec<RawTable>,
    pub mapping: MappingDictionary,
    pub ledger: GroundTruthLedger,
}

impl Generated {
    /// Writes `<tab>.csv` files, `mapping.json` and `ledger.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), GenError> {
        write_tables(dir, &self.tables)?;
        write_mapping(&dir.join("mapping.json"), &self.mapping)?;
        let path = dir.join("ledger.json");
        let text = serde_json::to_string_pretty(&self.ledger).expect("ledger serializes");
        std::fs::write(&path, text + "\n").map_err(|e| {
            GenError::Io(IngestError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Text,
    Other,
}

#[derive(Clone, Copy)]
enum Role {
    Key,
    /// Object property and target class.
    Link(&'static str, &'static str),
    /// A link column that is also part of the key.
    KeyLink(&'static str, &'static str),
    Data(Kind),
    /// Data that may also be written as the `None` sentinel.
    Noneable(Kind),
}

struct Col {
    header: &'static str,
    property: &'static str,
    role: Role,
}

const fn col(header: &'static str, property: &'static str, role: Role) -> Col {
    Col { header, property, role }
}

const T: Kind = Kind::Text;
const O: Kind = Kind::Other;

const SITES: &[Col] = &[
    col("Site ID", "siteId", Role::Key),
    col("Site Name", "siteName", Role::Data(T)),
    col("City", "city", Role::Data(T)),
    col("State", "state", Role::Data(T)),
    col("Latitude", "siteLatitude_decimal_deg", Role::Data(O)),
    col("Longitude", "siteLongitude_decimal_deg", Role::Data(O)),
    col("Elevation m", "elevation_m", Role::Data(O)),
];

const FIELDS: &[Col] = &[
    col("Field ID", "fieldId", Role::Key),
    col("Site ID", "isInSite", Role::Link("isInSite", "Site")),
    col("Field Name", "fieldName", Role::Data(T)),
    col("Area ha", "fieldArea_ha", Role::Data(O)),
    col("Soil Series", "soilSeries", Role::Noneable(T)),
    col("Established", "fieldEstablishedYear", Role::Data(O)),
];

const TREATMENTS: &[Col] = &[
    col("Treatment ID", "treatmentId", Role::Key),
    col("Descriptor", "treatmentDescriptor", Role::Data(T)),
    col("Crop", "crop", Role::Data(T)),
    col("Rotation", "rotationDescriptor", Role::Data(T)),
    col("Tillage", "tillageDescriptor", Role::Data(T)),
    col("Fertilizer Class", "fertilizerClass", Role::Data(T)),
    col("Residue Removal", "residueRemoval", Role::Data(T)),
    col("N Level", "nitrogenLevel", Role::Data(T)),
    col("Applied N kg/ha", "appliedNitrogen_kg_per_ha", Role::Data(O)),
    col("Irrigation", "irrigation", Role::Data(O)),
    col("Start Year", "treatmentStartYear", Role::Data(O)),
];

const UNITS: &[Col] = &[
    col("Exp Unit ID", "expUnitId", Role::Key),
    col("Field ID", "isInField", Role::Link("isInField", "Field")),
    col("Treatment ID", "hasTreatment", Role::Link("hasTreatment", "Treatment")),
    col("Latitude", "expUnitLatitude_decimal_deg", Role::Data(O)),
    col("Longitude", "expUnitLongitude_decimal_deg", Role::Data(O)),
    col("Start Date", "expUnitStartDate", Role::Data(O)),
    col("Slope %", "slope_percent", Role::Noneable(O)),
    col("Active", "expUnitIsActive", Role::Data(O)),
];

const CHEMICAL: &[Col] = &[
    col("Exp Unit ID", "hasChemSample", Role::KeyLink("hasChemSample", "ExperimentalUnit")),
    col("Date", "chemSampleDate", Role::Key),
    col("Upper cm", "chemUpperDepth_cm", Role::Key),
    col("Lower cm", "chemLowerDepth_cm", Role::Key),
    col("SOC gC/kg", "soilOrganicCarbon_gC_per_kg", Role::Data(O)),
    col("pH", "ph", Role::Data(O)),
    col("TN gN/kg", "totalNitrogen_gN_per_kg", Role::Data(O)),
    col("DNA", "soilDna", Role::Noneable(T)),
];

const PHYSICAL: &[Col] = &[
    col("Exp Unit ID", "hasPhysSample", Role::KeyLink("hasPhysSample", "ExperimentalUnit")),
    col("Date", "physSampleDate", Role::Key),
    col("Upper cm", "physUpperDepth_cm", Role::Key),
    col("Lower cm", "physLowerDepth_cm", Role::Key),
    col("BD g/cm3", "bulkDensity_g_per_cm_cubed", Role::Data(O)),
    col("Soil Temp C", "soilTemperature_degC", Role::Data(O)),
    col("Sand %", "sand_percent", Role::Noneable(O)),
];

const BIOLOGICAL: &[Col] = &[
    col("Exp Unit ID", "hasBioSample", Role::KeyLink("hasBioSample", "ExperimentalUnit")),
    col("Date", "bioSampleDate", Role::Key),
    col("Upper cm", "bioUpperDepth_cm", Role::Key),
    col("Lower cm", "bioLowerDepth_cm", Role::Key),
    col("MBC mgC/kg", "microbialBiomassCarbon_mgC_per_kg", Role::Data(O)),
    col("FAME", "fattyAcidMethylEsters", Role::Noneable(T)),
    col("PLFA", "phospholipidFattyAcids", Role::Noneable(T)),
];

const TABS: [(&str, &str, &[Col]); 7] = [
    ("sites", "Site", SITES),
    ("fields", "Field", FIELDS),
    ("treatments", "Treatment", TREATMENTS),
    ("units", "ExperimentalUnit", UNITS),
    ("chemical", "SoilChemicalSample", CHEMICAL),
    ("physical", "SoilPhysicalSample", PHYSICAL),
    ("biological", "SoilBiologicalSample", BIOLOGICAL),
];

fn mapping_for(class: &str, cols: &[Col]) -> TabMapping {
    let mut m = TabMapping {
        target_class: class.to_string(),
        column_map: BTreeMap::new(),
        key_columns: Vec::new(),
        link_columns: BTreeMap::new(),
    };
    for c in cols {
        match c.role {
            Role::Link(p, t) | Role::KeyLink(p, t) => {
                m.link_columns.insert(
                    c.header.to_string(),
                    LinkSpec {
                        object_property: p.to_string(),
                        target_class: t.to_string(),
                    },
                );
            }
            _ => {
                m.column_map.insert(c.header.to_string(), c.property.to_string());
            }
        }
        if matches!(c.role, Role::Key | Role::KeyLink(..)) {
            m.key_columns.push(c.header.to_string());
        }
    }
    m
}

/// What a data cell turned into.
#[derive(Clone, PartialEq)]
enum Written {
    Value(String),
    Missing,
    Empty,
}

struct Writer {
    rng: ChaCha8Rng,
    missing_fraction: f64,
    rows: Vec<Vec<Vec<String>>>,
    links: usize,
    literals: usize,
    missing: usize,
    empty: usize,
    data_props: BTreeSet<&'static str>,
    object_props: BTreeSet<&'static str>,
}

impl Writer {
    /// Appends a row to tab `t`; returns how each cell was written.
    fn row(&mut self, t: usize, cells: Vec<String>) -> Vec<Written> {
        let cols = TABS[t].2;
        debug_assert_eq!(cols.len(), cells.len());
        let mut out = Vec::with_capacity(cells.len());
        let mut text = Vec::with_capacity(cells.len());
        for (c, v) in cols.iter().zip(cells) {
            let w = match c.role {
                Role::Key => {
                    self.literals += 1;
                    self.data_props.insert(c.property);
                    Written::Value(v)
                }
                Role::Link(p, _) | Role::KeyLink(p, _) => {
                    self.links += 1;
                    self.object_props.insert(p);
                    Written::Value(v)
                }
                Role::Data(kind) | Role::Noneable(kind) => {
                    let r: f64 = self.rng.random();
                    let noneable = matches!(c.role, Role::Noneable(_));
                    if r < self.missing_fraction {
                        self.missing += 1;
                        Written::Missing
                    } else if noneable && r < 2.0 * self.missing_fraction {
                        self.empty += 1;
                        if kind == Kind::Text {
                            self.literals += 1;
                            self.data_props.insert(c.property);
                        }
                        Written::Empty
                    } else {
                        self.literals += 1;
                        self.data_props.insert(c.property);
                        Written::Value(v)
                    }
                }
            };
            text.push(match &w {
                Written::Value(v) => v.clone(),
                Written::Missing => "NaN".to_string(),
                Written::Empty => "None".to_string(),
            });
            out.push(w);
        }
        self.rows[t].push(text);
        out
    }
}

fn num(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

fn depth(v: f64) -> String {
    format!("{v}")
}

fn value_of(w: &Written) -> Option<f64> {
    match w {
        Written::Value(v) => v.parse().ok(),
        _ => None,
    }
}

const CROPS: [&str; 4] = ["Corn", "Soybean", "Sorghum", "Oat+Clover"];
const TILLAGE: [&str; 3] = ["none", "disk", "chisel"];
const FERTILIZER: [&str; 3] = ["organic", "synthetic", "none"];
const RESIDUE: [&str; 3] = ["none", "partial", "full"];
const N_LEVELS: [&str; 3] = ["0", "low", "high"];
const STATES: [(&str, &str, f64, f64); 6] = [
    ("Ames", "IA", 42.03, -93.62),
    ("Morris", "MN", 45.59, -95.91),
    ("Mead", "NE", 41.17, -96.47),
    ("Brookings", "SD", 44.31, -96.80),
    ("West Lafayette", "IN", 40.43, -86.91),
    ("Akron", "CO", 40.16, -103.21),
];

fn rotation(crop: &str, pick: usize) -> &'static str {
    let options: &[&str] = match crop {
        "Corn" => &["continuous corn", "corn/soybean (2-yr)", "corn/soybean/oat+clover (3-yr)"],
        "Soybean" => &["corn/soybean (2-yr)", "soybean/wheat (2-yr)"],
        "Sorghum" => &["continuous sorghum", "sorghum/soybean (2-yr)"],
        _ => &["corn/soybean/oat+clover (3-yr)"],
    };
    options[pick % options.len()]
}

struct LedgerLayer {
    upper: f64,
    lower: f64,
    oc: f64,
    bd: f64,
}

enum Outcome {
    TooShallow,
    StartsBelow,
    Gap,
    Stock(f64),
}

/// Window stock from coverage: each layer contributes its overlap with the
/// window, and the overlaps must add up to the window's thickness.
fn ledger_outcome(layers: &[LedgerLayer], w: DepthWindow) -> Outcome {
    let deepest = layers.iter().map(|l| l.lower).fold(f64::MIN, f64::max);
    let shallowest = layers.iter().map(|l| l.upper).fold(f64::MAX, f64::min);
    if deepest < w.lower_cm {
        return Outcome::TooShallow;
    }
    if shallowest > w.upper_cm {
        return Outcome::StartsBelow;
    }
    let mut covered = 0.0;
    let mut stock = 0.0;
    for l in layers {
        let overlap = (l.lower.min(w.lower_cm) - l.upper.max(w.upper_cm)).max(0.0);
        covered += overlap;
        stock += l.oc * l.bd * overlap * 100.0;
    }
    if (covered - (w.lower_cm - w.upper_cm)).abs() > 1e-9 {
        return Outcome::Gap;
    }
    Outcome::Stock(stock)
}

pub fn generate(cfg: &GenConfig) -> Result<Generated, GenError> {
    cfg.validate()?;
    let window = DepthWindow::default();
    let mut w = Writer {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        missing_fraction: cfg.missing_fraction,
        rows: vec![Vec::new(); TABS.len()],
        links: 0,
        literals: 0,
        missing: 0,
        empty: 0,
        data_props: BTreeSet::new(),
        object_props: BTreeSet::new(),
    };

    // Treatments; the first one always matches the corn / partial / synthetic filter.
    let mut treatments = Vec::with_capacity(cfg.n_treatments);
    for i in 0..cfg.n_treatments {
        let uid = format!("T{:03}", i + 1);
        let (crop, tillage, fert, residue) = if i == 0 {
            ("Corn", "chisel", "synthetic", "partial")
        } else {
            (
                CROPS[w.rng.random_range(0..CROPS.len())],
                TILLAGE[w.rng.random_range(0..TILLAGE.len())],
                FERTILIZER[w.rng.random_range(0..FERTILIZER.len())],
                RESIDUE[w.rng.random_range(0..RESIDUE.len())],
            )
        };
        let level = N_LEVELS[w.rng.random_range(0..N_LEVELS.len())];
        let rot = rotation(crop, w.rng.random_range(0..3));
        let irrigated = w.rng.random_bool(0.4);
        let n = applied_nitrogen(crop, level).expect("known crop and level");
        let effect = match (tillage, fert) {
            ("none", "organic") => 4.0,
            ("none", _) | (_, "organic") => 2.0,
            _ => 0.0,
        } + if irrigated { 1.5 } else { 0.0 };
        let start = cfg.start_year - w.rng.random_range(0..10);
        w.row(
            2,
            vec![
                uid.clone(),
                format!("{crop}, {tillage} tillage, N {level}"),
                crop.to_string(),
                rot.to_string(),
                tillage.to_string(),
                fert.to_string(),
                residue.to_string(),
                level.to_string(),
                num(n, 1),
                irrigated.to_string(),
                start.to_string(),
            ],
        );
        treatments.push((uid, effect));
    }

    let mut stocks: BTreeMap<String, (f64, usize, BTreeSet<String>)> = BTreeMap::new();
    let (mut profiles, mut too_shallow, mut starts_below, mut gap, mut surviving) = (0, 0, 0, 0, 0);

    for s in 0..cfg.n_sites {
        let site = format!("S{:02}", s + 1);
        let (city, state, lat, lon) = STATES[s % STATES.len()];
        let (lat, lon) = (lat + (s / STATES.len()) as f64 * 0.5, lon);
        let elevation = w.rng.random_range(150.0..1500.0);
        w.row(
            0,
            vec![
                site.clone(),
                format!("{city} research farm {}", s + 1),
                city.to_string(),
                state.to_string(),
                num(lat, 5),
                num(lon, 5),
                num(elevation, 1),
            ],
        );
        for f in 0..cfg.fields_per_site {
            let field = format!("{site}F{:02}", f + 1);
            let area = w.rng.random_range(1.0..40.0);
            let series = ["Clarion", "Nicollet", "Webster", "Barnes"][w.rng.random_range(0..4)];
            let established = 1950 + w.rng.random_range(0..60);
            w.row(
                1,
                vec![
                    field.clone(),
                    site.clone(),
                    format!("Field {}", f + 1),
                    num(area, 2),
                    series.to_string(),
                    established.to_string(),
                ],
            );
            for u in 0..cfg.units_per_field {
                let unit = format!("{field}U{:03}", u + 1);
                let t = w.rng.random_range(0..treatments.len());
                let (treatment, effect) = treatments[t].clone();
                let start = NaiveDate::from_ymd_opt(cfg.start_year - 1, 4, 1 + w.rng.random_range(0..28)).expect("valid date");
                let jitter = |r: &mut ChaCha8Rng| r.random_range(-0.01..0.01);
                let ulat = lat + jitter(&mut w.rng);
                let ulon = lon + jitter(&mut w.rng);
                let slope = w.rng.random_range(0.0..8.0);
                w.row(
                    3,
                    vec![
                        unit.clone(),
                        field.clone(),
                        treatment.clone(),
                        num(ulat, 5),
                        num(ulon, 5),
                        start.to_string(),
                        num(slope, 1),
                        "true".to_string(),
                    ],
                );
                let surface_oc = 8.0 + 14.0 * w.rng.random::<f64>() + effect;
                for y in 0..cfg.years {
                    let year = cfg.start_year + y as i32;
                    for k in 0..cfg.samples_per_unit_per_year {
                        let month = (3 + k * 12 / cfg.samples_per_unit_per_year) % 12 + 1;
                        let day = 1 + w.rng.random_range(0..28);
                        let date = NaiveDate::from_ymd_opt(year, month as u32, day).expect("valid date");
                        let shallow = w.rng.random::<f64>() < cfg.shallow_fraction;
                        let layers: Vec<(f64, f64)> = cfg
                            .depth_scheme
                            .iter()
                            .copied()
                            .filter(|&(_, l)| !shallow || l < window.lower_cm)
                            .collect();
                        let mut joined = Vec::new();
                        for &(upper, lower) in &layers {
                            let mid = (upper + lower) / 2.0;
                            let drift = 0.15 * y as f64;
                            let oc = (surface_oc * (-mid / 35.0).exp() + drift + w.rng.random_range(-0.5..0.5)).clamp(2.0, 30.0);
                            let bd = (1.1 + mid * 0.008 + w.rng.random_range(-0.1..0.1)).clamp(0.9, 1.7);
                            let key = |u: &str| vec![u.to_string(), date.to_string(), depth(upper), depth(lower)];
                            let mut chem = key(&unit);
                            chem.extend([
                                num(oc, 2),
                                num(w.rng.random_range(5.2..7.8), 2),
                                num(oc / w.rng.random_range(9.0..13.0), 3),
                                "ACGT".repeat(1 + w.rng.random_range(0..3)),
                            ]);
                            let chem = w.row(4, chem);
                            let mut phys = key(&unit);
                            phys.extend([
                                num(bd, 3),
                                num(w.rng.random_range(4.0..24.0), 1),
                                num(w.rng.random_range(10.0..60.0), 1),
                            ]);
                            let phys = w.row(5, phys);
                            if let (Some(oc), Some(bd)) = (value_of(&chem[4]), value_of(&phys[4])) {
                                joined.push(LedgerLayer { upper, lower, oc, bd });
                            }
                        }
                        if k == 0 {
                            if let Some(&(upper, lower)) = layers.first() {
                                let mbc = w.rng.random_range(100.0..900.0);
                                w.row(
                                    6,
                                    vec![
                                        unit.clone(),
                                        date.to_string(),
                                        depth(upper),
                                        depth(lower),
                                        num(mbc, 1),
                                        "C16:0;C18:1".to_string(),
                                        "i15:0;a15:0".to_string(),
                                    ],
                                );
                            }
                        }
                        if joined.is_empty() {
                            continue;
                        }
                        profiles += 1;
                        match ledger_outcome(&joined, window) {
                            Outcome::TooShallow => too_shallow += 1,
                            Outcome::StartsBelow => starts_below += 1,
                            Outcome::Gap => gap += 1,
                            Outcome::Stock(v) => {
                                surviving += 1;
                                let e = stocks.entry(treatment.clone()).or_default();
                                e.0 += v;
                                e.1 += 1;
                                e.2.insert(unit.clone());
                            }
                        }
                    }
                }
            }
        }
    }

    let mut tables = Vec::new();
    let mut mapping = MappingDictionary::default();
    let mut rows_per_tab = BTreeMap::new();
    let mut classes_used = 0;
    for ((name, class, cols), rows) in TABS.iter().zip(std::mem::take(&mut w.rows)) {
        rows_per_tab.insert(name.to_string(), rows.len());
        classes_used += usize::from(!rows.is_empty());
        let headers = cols.iter().map(|c| c.header.to_string()).collect();
        tables.push(RawTable::new(*name, headers, rows)?);
        mapping.tabs.insert(name.to_string(), mapping_for(class, cols));
    }
    let n_entities = rows_per_tab.values().sum();
    let ledger = GroundTruthLedger {
        seed: cfg.seed,
        window,
        stats: GraphStats {
            n_classes_used: classes_used,
            n_object_property_types_used: w.object_props.len(),
            n_data_property_types_used: w.data_props.len(),
            n_entities,
            n_links: w.links,
            n_literal_assertions: w.literals,
        },
        rows_per_tab,
        missing_cells: w.missing,
        empty_cells: w.empty,
        profiles,
        too_shallow,
        starts_below_window: starts_below,
        gap_in_window: gap,
        surviving,
        mean_stock_by_treatment: stocks
            .into_iter()
            .map(|(t, (sum, n, units))| {
                (
                    t,
                    AggregateResult {
                        mean_stock_kgc_per_ha: sum / n as f64,
                        n_samples: n,
                        n_units: units.len(),
                    },
                )
            })
            .collect(),
    };
    Ok(Generated { tables, mapping, ledger })
}
