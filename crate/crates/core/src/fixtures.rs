//! Built-in grocery catalog and container used by the CLI defaults and tests.
//!
//! Dimensions approximate the bounding boxes of common grocery items. The
//! container is sized so that a uniformly drawn subset of the 24 objects
//! lands in the 70-90% fill band roughly a third of the time.

use alloc::vec::Vec;

use crate::catalog::{BBox, ContainerSpec, ObjectCatalog, ObjectSpec};

const GROCERIES: [(&str, &str, [f64; 3]); 24] = [
    ("apple", "Apple", [0.075, 0.075, 0.075]),
    ("banana", "Banana", [0.19, 0.036, 0.036]),
    ("bleach_cleanser", "Bleach cleanser", [0.1025, 0.067, 0.25]),
    ("bowl", "Bowl", [0.159, 0.159, 0.053]),
    ("bread", "Bread", [0.25, 0.12, 0.10]),
    ("chips_can", "Chips can", [0.075, 0.075, 0.25]),
    ("cracker_box", "Cracker box", [0.16, 0.06, 0.21]),
    ("gelatin_box", "Gelatin box", [0.089, 0.073, 0.028]),
    ("lemon", "Lemon", [0.054, 0.054, 0.068]),
    ("milk_carton", "Milk carton", [0.095, 0.095, 0.20]),
    ("mug", "Mug", [0.117, 0.081, 0.081]),
    ("mustard_bottle", "Mustard bottle", [0.095, 0.058, 0.19]),
    ("orange", "Orange", [0.073, 0.073, 0.073]),
    ("peach", "Peach", [0.059, 0.059, 0.059]),
    ("pear", "Pear", [0.066, 0.066, 0.10]),
    ("plum", "Plum", [0.052, 0.052, 0.052]),
    ("potted_meat_can", "Potted meat can", [0.101, 0.051, 0.083]),
    ("pudding_box", "Pudding box", [0.11, 0.089, 0.035]),
    ("sponge", "Sponge", [0.072, 0.114, 0.014]),
    ("strawberry", "Strawberry", [0.044, 0.044, 0.05]),
    ("sugar_box", "Sugar box", [0.09, 0.04, 0.175]),
    ("tomato_soup_can", "Tomato soup can", [0.067, 0.067, 0.102]),
    ("toothbrush", "Toothbrush", [0.19, 0.025, 0.02]),
    ("tuna_fish_can", "Tuna fish can", [0.085, 0.085, 0.033]),
];

pub fn grocery_catalog() -> ObjectCatalog {
    let objects: Vec<ObjectSpec> = GROCERIES
        .iter()
        .map(|&(id, name, [w, d, h])| ObjectSpec {
            id: id.into(),
            name: name.into(),
            bbox: BBox::new(w, d, h),
        })
        .collect();
    ObjectCatalog::new(objects).expect("fixture catalog is valid")
}

pub fn grocery_container() -> ContainerSpec {
    ContainerSpec::new(0.36, 0.26, 0.12).expect("fixture container is valid")
}
