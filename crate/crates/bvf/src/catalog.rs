//! Shape-catalog serialization and the seeded instance generators used by
//! the randomized sweeps.
//!
//! Catalog documents are JSON: {d, terms: [{weight, kind, params,
//! rotation (row-major), translation}]}, angles in radians, lengths
//! dimensionless.

use crate::error::{Error, Result};
use crate::geometry::{BVFunction, Shape, ShapeKind};
use crate::vec::Rotation;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogDoc {
    pub d: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDoc {
    pub weight: f64,
    #[serde(flatten)]
    pub kind: KindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum KindDoc {
    AxisBox { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl CatalogDoc {
    pub fn from_function(u: &BVFunction) -> CatalogDoc {
        let terms = u
            .terms()
            .iter()
            .map(|(w, s)| {
                let kind = match s.kind() {
                    ShapeKind::AxisBox { lo, hi } => KindDoc::AxisBox {
                        lo: lo.clone(),
                        hi: hi.clone(),
                    },
                    ShapeKind::Ball { center, radius } => KindDoc::Ball {
                        center: center.clone(),
                        radius: *radius,
                    },
                    ShapeKind::Polygon { vertices } => KindDoc::Polygon {
                        vertices: vertices.clone(),
                    },
                };
                let rotation = if s.rotation().is_identity() {
                    None
                } else {
                    Some(s.rotation().rows())
                };
                let tau = s.translation();
                let translation = if tau.iter().all(|t| *t == 0.0) {
                    None
                } else {
                    Some(tau[..s.dim()].to_vec())
                };
                TermDoc {
                    weight: *w,
                    kind,
                    rotation,
                    translation,
                }
            })
            .collect();
        CatalogDoc { d: u.dim(), terms }
    }

    pub fn into_function(self) -> Result<BVFunction> {
        let d = self.d;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            let mut shape = match t.kind {
                KindDoc::AxisBox { lo, hi } => Shape::axis_box(d, &lo, &hi)?,
                KindDoc::Ball { center, radius } => Shape::ball(d, &center, radius)?,
                KindDoc::Polygon { vertices } => {
                    if d != 2 {
                        return Err(Error::InvalidShape("polygons are d = 2 only".into()));
                    }
                    Shape::polygon(vertices)?
                }
            };
            if let Some(rows) = t.rotation {
                shape = shape.with_rotation(Rotation::from_rows(&rows, d)?)?;
            }
            if let Some(tau) = t.translation {
                shape = shape.with_translation(&tau)?;
            }
            terms.push((t.weight, shape));
        }
        BVFunction::new(d, terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serialization")
    }

    pub fn from_json(text: &str) -> Result<CatalogDoc> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("catalog parse error: {e}")))
    }
}

/// Named single-shape functions for the CLI: `square`, `disk`,
/// `ball:R`, `square:SIDE`, `box:x0,y0,x1,y1`, `whisker` (indicator side).
pub fn named_function(name: &str) -> Result<BVFunction> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts[0] {
        "square" => {
            let side = if parts.len() > 1 {
                parts[1]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad side in {name}")))?
            } else {
                1.0
            };
            Ok(BVFunction::indicator(Shape::square(side)))
        }
        "disk" => Ok(BVFunction::indicator(Shape::unit_disk())),
        "ball" => {
            let r: f64 = parts
                .get(1)
                .ok_or_else(|| Error::InvalidInput("ball needs a radius".into()))?
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad radius in {name}")))?;
            // centered in the unit cell so torus experiments are natural
            Ok(BVFunction::indicator(Shape::ball(2, &[0.5, 0.5], r)?))
        }
        "box" => {
            let nums: Vec<f64> = parts
                .get(1)
                .ok_or_else(|| Error::InvalidInput("box needs coordinates".into()))?
                .split(',')
                .map(|s| s.parse().map_err(|_| Error::InvalidInput(format!("bad box {name}"))))
                .collect::<Result<_>>()?;
            if nums.len() != 4 {
                return Err(Error::InvalidInput("box:x0,y0,x1,y1".into()));
            }
            Ok(BVFunction::indicator(Shape::axis_box(
                2,
                &[nums[0], nums[1]],
                &[nums[2], nums[3]],
            )?))
        }
        "whisker" => Ok(BVFunction::indicator(Shape::unit_disk())),
        _ => Err(Error::InvalidInput(format!("unknown shape name {name}"))),
    }
}

/// Randomized box-union catalog on the half-integer grid in [0, 2]^2. Grid
/// alignment makes shared facets common, so mixed jump products are
/// generically nonzero; instances whose own jump product degenerates below
/// 1 are resampled so relative tolerances stay meaningful.
pub fn box_union_catalog(count: usize, seed: u64) -> Vec<BVFunction> {
    let mut out = Vec::with_capacity(count);
    let mut stream = 0u64;
    while out.len() < count {
        stream += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let nboxes = 2 + (rng.gen::<u32>() % 2) as usize;
        let mut terms = Vec::new();
        for _ in 0..nboxes {
            // half-integer corners in [0, 2]
            let grid = 4i64;
            loop {
                let x0 = (rng.gen::<u32>() as i64 % grid) as f64 * 0.5;
                let y0 = (rng.gen::<u32>() as i64 % grid) as f64 * 0.5;
                let wx = 0.5 + 0.5 * (rng.gen::<u32>() % 3) as f64;
                let wy = 0.5 + 0.5 * (rng.gen::<u32>() % 3) as f64;
                let x1 = (x0 + wx).min(2.0);
                let y1 = (y0 + wy).min(2.0);
                if x1 > x0 && y1 > y0 {
                    let weight = match rng.gen::<u32>() % 4 {
                        0 => 2.0,
                        1 => -1.0,
                        _ => 1.0,
                    };
                    terms.push((
                        weight,
                        Shape::axis_box(2, &[x0, y0], &[x1, y1]).unwrap(),
                    ));
                    break;
                }
            }
        }
        let u = BVFunction::new(2, terms).unwrap();
        let j = crate::geometry::jump_product(&u, &u)
            .map(|r| r.value)
            .unwrap_or(0.0);
        if j >= 1.0 {
            out.push(u);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_roundtrip() {
        let u = BVFunction::new(
            2,
            vec![
                (1.0, Shape::unit_square()),
                (
                    -2.0,
                    Shape::ball(2, &[0.3, 0.4], 0.2)
                        .unwrap()
                        .with_rotation(Rotation::from_angle_2d(0.5))
                        .unwrap()
                        .with_translation(&[1.0, -1.0])
                        .unwrap(),
                ),
            ],
        )
        .unwrap();
        let doc = CatalogDoc::from_function(&u);
        let json = doc.to_json();
        let back = CatalogDoc::from_json(&json).unwrap().into_function().unwrap();
        assert_eq!(back.terms().len(), 2);
        assert_eq!(back.terms()[0].0, 1.0);
        assert_eq!(back.terms()[1].0, -2.0);
        // same mass and diameter after the roundtrip
        assert!((back.mass() - u.mass()).abs() < 1e-15);
        assert!((back.diameter() - u.diameter()).abs() < 1e-12);
    }

    #[test]
    fn invalid_catalogs_rejected() {
        // zero weight
        let bad = r#"{"d":2,"terms":[{"weight":0.0,"kind":"axis_box","params":{"lo":[0,0],"hi":[1,1]}}]}"#;
        assert!(CatalogDoc::from_json(bad).unwrap().into_function().is_err());
        // inverted box
        let bad = r#"{"d":2,"terms":[{"weight":1.0,"kind":"axis_box","params":{"lo":[1,0],"hi":[0,1]}}]}"#;
        assert!(CatalogDoc::from_json(bad).unwrap().into_function().is_err());
    }

    #[test]
    fn named_functions() {
        assert!((named_function("square").unwrap().mass() - 1.0).abs() < 1e-15);
        assert!(
            (named_function("ball:0.25").unwrap().mass() - std::f64::consts::PI / 16.0).abs()
                < 1e-15
        );
        assert!(named_function("nonsense").is_err());
    }

    #[test]
    fn box_union_catalog_is_reproducible_and_nontrivial() {
        let a = box_union_catalog(10, 7);
        let b = box_union_catalog(10, 7);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.terms().len(), y.terms().len());
            assert_eq!(x.mass(), y.mass());
        }
        for u in &a {
            let j = crate::geometry::jump_product(u, u).unwrap().value;
            assert!(j > 0.5, "catalog instance with tiny jump product {j}");
        }
    }
}
