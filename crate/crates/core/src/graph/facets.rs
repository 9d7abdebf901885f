//! Treatment filtering and dependent facet options.
//!
//! Text fields compare ASCII case-insensitively, so a filter for `Partial`
//! selects treatments recorded as `partial`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EntityId, KnowledgeGraph};
use crate::value::Scalar;
use crate::vocab::{self, treatment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FacetField {
    Crop,
    FertilizerClass,
    ResidueRemoval,
    Tillage,
    Irrigation,
    NitrogenLevel,
    Rotation,
}

pub const FACET_FIELDS: [FacetField; 7] = [
    FacetField::Crop,
    FacetField::FertilizerClass,
    FacetField::ResidueRemoval,
    FacetField::Tillage,
    FacetField::Irrigation,
    FacetField::NitrogenLevel,
    FacetField::Rotation,
];

impl FacetField {
    /// Treatment data property holding the facet value.
    pub fn property(self) -> &'static str {
        match self {
            FacetField::Crop => treatment::CROP,
            FacetField::FertilizerClass => treatment::FERTILIZER_CLASS,
            FacetField::ResidueRemoval => treatment::RESIDUE_REMOVAL,
            FacetField::Tillage => treatment::TILLAGE,
            FacetField::Irrigation => treatment::IRRIGATION,
            FacetField::NitrogenLevel => treatment::NITROGEN_LEVEL,
            FacetField::Rotation => treatment::ROTATION,
        }
    }

    /// Query-parameter and JSON key.
    pub fn key(self) -> &'static str {
        match self {
            FacetField::Crop => "crop",
            FacetField::FertilizerClass => "fertilizerClass",
            FacetField::ResidueRemoval => "residueRemoval",
            FacetField::Tillage => "tillage",
            FacetField::Irrigation => "irrigation",
            FacetField::NitrogenLevel => "nitrogenLevel",
            FacetField::Rotation => "rotation",
        }
    }

    pub fn from_key(key: &str) -> Option<FacetField> {
        FACET_FIELDS.into_iter().find(|f| f.key() == key)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TreatmentFilter {
    pub crop: Option<String>,
    pub fertilizer_class: Option<String>,
    pub residue_removal: Option<String>,
    pub tillage: Option<String>,
    pub irrigation: Option<bool>,
    pub nitrogen_level: Option<String>,
    pub rotation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{value}` is not a valid {field:?} value")]
pub struct FacetValueError {
    pub field: FacetField,
    pub value: String,
}

/// Parses `true`/`false`/`yes`/`no`, any case.
pub fn parse_flag(text: &str) -> Option<bool> {
    match text.to_ascii_lowercase().as_str() {
        "true" | "yes" => Some(true),
        "false" | "no" => Some(false),
        _ => None,
    }
}

impl TreatmentFilter {
    fn text_mut(&mut self, field: FacetField) -> Option<&mut Option<String>> {
        match field {
            FacetField::Crop => Some(&mut self.crop),
            FacetField::FertilizerClass => Some(&mut self.fertilizer_class),
            FacetField::ResidueRemoval => Some(&mut self.residue_removal),
            FacetField::Tillage => Some(&mut self.tillage),
            FacetField::NitrogenLevel => Some(&mut self.nitrogen_level),
            FacetField::Rotation => Some(&mut self.rotation),
            FacetField::Irrigation => None,
        }
    }

    /// Sets `field` from its textual form, as offered by [`facet_options`].
    pub fn set(&mut self, field: FacetField, value: &str) -> Result<(), FacetValueError> {
        match self.text_mut(field) {
            Some(slot) => *slot = Some(value.to_string()),
            None => {
                self.irrigation = Some(parse_flag(value).ok_or_else(|| FacetValueError {
                    field,
                    value: value.to_string(),
                })?)
            }
        }
        Ok(())
    }

    pub fn with(mut self, field: FacetField, value: &str) -> Result<Self, FacetValueError> {
        self.set(field, value)?;
        Ok(self)
    }

    pub fn clear(&mut self, field: FacetField) {
        match self.text_mut(field) {
            Some(slot) => *slot = None,
            None => self.irrigation = None,
        }
    }

    pub fn is_set(&self, field: FacetField) -> bool {
        match field {
            FacetField::Irrigation => self.irrigation.is_some(),
            f => self.clone().text_mut(f).is_some_and(|s| s.is_some()),
        }
    }

    fn matches_field(&self, field: FacetField, value: Option<&Scalar>) -> bool {
        match field {
            FacetField::Irrigation => match self.irrigation {
                None => true,
                Some(want) => value.and_then(Scalar::as_bool) == Some(want),
            },
            f => {
                let want = match f {
                    FacetField::Crop => &self.crop,
                    FacetField::FertilizerClass => &self.fertilizer_class,
                    FacetField::ResidueRemoval => &self.residue_removal,
                    FacetField::Tillage => &self.tillage,
                    FacetField::NitrogenLevel => &self.nitrogen_level,
                    FacetField::Rotation => &self.rotation,
                    FacetField::Irrigation => unreachable!(),
                };
                match want {
                    None => true,
                    Some(w) => value
                        .and_then(Scalar::as_str)
                        .is_some_and(|v| v.eq_ignore_ascii_case(w)),
                }
            }
        }
    }

    fn matches_except(&self, g: &KnowledgeGraph, id: EntityId, skip: Option<FacetField>) -> bool {
        let e = g.entity(id);
        FACET_FIELDS
            .into_iter()
            .filter(|f| Some(*f) != skip)
            .all(|f| self.matches_field(f, e.get(f.property())))
    }

    pub fn matches(&self, g: &KnowledgeGraph, id: EntityId) -> bool {
        self.matches_except(g, id, None)
    }
}

/// Treatments satisfying every present field, in uid order.
pub fn filter_treatments(g: &KnowledgeGraph, f: &TreatmentFilter) -> Vec<EntityId> {
    g.ids_of(vocab::TREATMENT).filter(|&id| f.matches(g, id)).collect()
}

/// Per facet, the distinct values among treatments matching `f` with that
/// facet's own constraint lifted.
pub fn facet_options(g: &KnowledgeGraph, f: &TreatmentFilter) -> BTreeMap<FacetField, Vec<String>> {
    FACET_FIELDS
        .into_iter()
        .map(|field| {
            let values: BTreeSet<String> = g
                .ids_of(vocab::TREATMENT)
                .filter(|&id| f.matches_except(g, id, Some(field)))
                .filter_map(|id| g.entity(id).get(field.property()).map(Scalar::lexical))
                .collect();
            (field, values.into_iter().collect())
        })
        .collect()
}
