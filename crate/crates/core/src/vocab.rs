//! Names of the ontology terms the analytics, facets and generator rely on.

pub const SITE: &str = "Site";
pub const FIELD: &str = "Field";
pub const EXPERIMENTAL_UNIT: &str = "ExperimentalUnit";
pub const TREATMENT: &str = "Treatment";
pub const CHEMICAL_SAMPLE: &str = "SoilChemicalSample";
pub const PHYSICAL_SAMPLE: &str = "SoilPhysicalSample";
pub const BIOLOGICAL_SAMPLE: &str = "SoilBiologicalSample";

pub const HAS_CHEM_SAMPLE: &str = "hasChemSample";
pub const HAS_PHYS_SAMPLE: &str = "hasPhysSample";
pub const HAS_BIO_SAMPLE: &str = "hasBioSample";
pub const HAS_TREATMENT: &str = "hasTreatment";
pub const IS_IN_FIELD: &str = "isInField";
pub const IS_IN_SITE: &str = "isInSite";

pub const ORGANIC_CARBON: &str = "soilOrganicCarbon_gC_per_kg";
pub const BULK_DENSITY: &str = "bulkDensity_g_per_cm_cubed";

pub const UNIT_LATITUDE: &str = "expUnitLatitude_decimal_deg";
pub const UNIT_LONGITUDE: &str = "expUnitLongitude_decimal_deg";

/// The three soil-sample classes and, per class, the link from the unit and
/// the date and depth properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleKind {
    pub key: &'static str,
    pub class: &'static str,
    pub link: &'static str,
    pub date: &'static str,
    pub upper: &'static str,
    pub lower: &'static str,
}

pub const CHEMICAL: SampleKind = SampleKind {
    key: "chemical",
    class: CHEMICAL_SAMPLE,
    link: HAS_CHEM_SAMPLE,
    date: "chemSampleDate",
    upper: "chemUpperDepth_cm",
    lower: "chemLowerDepth_cm",
};

pub const PHYSICAL: SampleKind = SampleKind {
    key: "physical",
    class: PHYSICAL_SAMPLE,
    link: HAS_PHYS_SAMPLE,
    date: "physSampleDate",
    upper: "physUpperDepth_cm",
    lower: "physLowerDepth_cm",
};

pub const BIOLOGICAL: SampleKind = SampleKind {
    key: "biological",
    class: BIOLOGICAL_SAMPLE,
    link: HAS_BIO_SAMPLE,
    date: "bioSampleDate",
    upper: "bioUpperDepth_cm",
    lower: "bioLowerDepth_cm",
};

pub const SAMPLE_KINDS: [SampleKind; 3] = [CHEMICAL, PHYSICAL, BIOLOGICAL];

impl SampleKind {
    pub fn by_key(key: &str) -> Option<SampleKind> {
        SAMPLE_KINDS.into_iter().find(|k| k.key == key)
    }
}

/// Treatment attributes exposed as facets, in display order.
pub mod treatment {
    pub const ID: &str = "treatmentId";
    pub const CROP: &str = "crop";
    pub const FERTILIZER_CLASS: &str = "fertilizerClass";
    pub const RESIDUE_REMOVAL: &str = "residueRemoval";
    pub const TILLAGE: &str = "tillageDescriptor";
    pub const IRRIGATION: &str = "irrigation";
    pub const NITROGEN_LEVEL: &str = "nitrogenLevel";
    pub const ROTATION: &str = "rotationDescriptor";
    pub const APPLIED_NITROGEN: &str = "appliedNitrogen_kg_per_ha";
    pub const DESCRIPTOR: &str = "treatmentDescriptor";
}
