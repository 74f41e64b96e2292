//! Built-in example fields.

use serde::Serialize;

use crate::error::Error;
use crate::expr::VectorFieldSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub components: [&'static str; 3],
    pub normalize: bool,
    pub description: &'static str,
}

impl GalleryEntry {
    pub fn field(&self) -> VectorFieldSpec {
        let [a, b, c] = self.components;
        VectorFieldSpec::from_components(a, b, c, self.normalize).expect("gallery entries parse")
    }
}

const GALLERY: [GalleryEntry; 6] = [
    GalleryEntry {
        name: "constant",
        components: ["1", "0", "0"],
        normalize: false,
        description: "parallel lines; integrable plane field, not contact",
    },
    GalleryEntry {
        name: "theta-linear",
        components: ["cos(z)", "-sin(z)", "0"],
        normalize: false,
        description: "rank-1 normal form with theta(z) = z",
    },
    GalleryEntry {
        name: "theta-cubic",
        components: ["cos(z+z^3/3)", "-sin(z+z^3/3)", "0"],
        normalize: false,
        description: "rank-1 normal form with theta(z) = z + z^3/3",
    },
    GalleryEntry {
        name: "theta-sine",
        components: ["cos(sin(z))", "-sin(sin(z))", "0"],
        normalize: false,
        description: "rank-1 normal form with theta(z) = sin z; contact fails where cos z = 0",
    },
    GalleryEntry {
        name: "skew-hopf",
        components: ["z*x-y", "x+z*y", "1+z^2"],
        normalize: true,
        description: "skew fibration with dV of rank 2 everywhere",
    },
    GalleryEntry {
        name: "helix-not-straight",
        components: ["-y", "x", "1"],
        normalize: true,
        description: "integral curves are helices; not a line fibration",
    },
];

pub fn example_gallery() -> &'static [GalleryEntry] {
    &GALLERY
}

pub fn example(name: &str) -> Result<&'static GalleryEntry, Error> {
    GALLERY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown example `{name}`")))
}
