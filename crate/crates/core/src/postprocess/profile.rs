//! Through-thickness sampling and fixed-format CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layup::Side;
use crate::postprocess::ResultField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileQuantity {
    U,
    V,
    W,
    Sxx,
    Syy,
    Sxy,
    Sxz,
    Syz,
}

impl ProfileQuantity {
    pub const ALL: [ProfileQuantity; 8] = [
        ProfileQuantity::U,
        ProfileQuantity::V,
        ProfileQuantity::W,
        ProfileQuantity::Sxx,
        ProfileQuantity::Syy,
        ProfileQuantity::Sxy,
        ProfileQuantity::Sxz,
        ProfileQuantity::Syz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileQuantity::U => "u",
            ProfileQuantity::V => "v",
            ProfileQuantity::W => "w",
            ProfileQuantity::Sxx => "sxx",
            ProfileQuantity::Syy => "syy",
            ProfileQuantity::Sxy => "sxy",
            ProfileQuantity::Sxz => "sxz",
            ProfileQuantity::Syz => "syz",
        }
    }
}

impl fmt::Display for ProfileQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "profile quantity",
                name: s.to_string(),
            })
    }
}

/// One sample of a profile. Interface samples carry the side they belong to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub z: f64,
    pub side: Option<Side>,
    pub value: f64,
}

/// Samples `quantity` at `per_layer` evenly spaced stations in every layer,
/// both ends included, so each interface appears once from each side.
pub fn thickness_profile(
    field: &ResultField,
    x: f64,
    y: f64,
    quantity: ProfileQuantity,
    per_layer: usize,
) -> Result<Vec<ProfileRow>> {
    if per_layer < 2 {
        return Err(Error::Domain("a profile needs at least two stations per layer".into()));
    }
    let layup = &field.model().layup;
    let num_layers = layup.layers().len();
    let shear = match quantity {
        ProfileQuantity::Sxz | ProfileQuantity::Syz => Some(field.transverse_shear(x, y)?),
        _ => None,
    };
    let mut rows = Vec::with_capacity(num_layers * per_layer);
    for (k, layer) in layup.layers().iter().enumerate() {
        for i in 0..per_layer {
            let z = layer.bottom + layer.thickness() * i as f64 / (per_layer - 1) as f64;
            let side = if i == 0 && k > 0 {
                Some(Side::Above)
            } else if i + 1 == per_layer && k + 1 < num_layers {
                Some(Side::Below)
            } else {
                None
            };
            let value = match quantity {
                ProfileQuantity::U => field.displacement_at(x, y, z, side)?[0],
                ProfileQuantity::V => field.displacement_at(x, y, z, side)?[1],
                ProfileQuantity::W => field.displacement_at(x, y, z, side)?[2],
                ProfileQuantity::Sxx => field.in_plane_stress_at(x, y, z, side)?[0],
                ProfileQuantity::Syy => field.in_plane_stress_at(x, y, z, side)?[1],
                ProfileQuantity::Sxy => field.in_plane_stress_at(x, y, z, side)?[2],
                ProfileQuantity::Sxz => shear.as_ref().unwrap().at(z)?[0],
                ProfileQuantity::Syz => shear.as_ref().unwrap().at(z)?[1],
            };
            rows.push(ProfileRow { z, side, value });
        }
    }
    Ok(rows)
}

/// Nine significant digits in scientific notation; negative zero prints as zero.
pub fn format_sci(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

fn side_label(side: Option<Side>) -> &'static str {
    match side {
        Some(Side::Below) => "below",
        Some(Side::Above) => "above",
        None => "",
    }
}

/// Writes `z,side,<quantity>,<quantity>_nondim` rows after a header naming the
/// quantity and the scaling that produced the last column.
pub fn write_profile_csv(
    mut w: impl Write,
    quantity: ProfileQuantity,
    scaling: &str,
    rows: &[ProfileRow],
    scale: f64,
) -> std::io::Result<()> {
    writeln!(w, "# quantity={quantity} scaling={scaling}")?;
    writeln!(w, "z,side,{quantity},{quantity}_nondim")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            format_sci(r.z),
            side_label(r.side),
            format_sci(r.value),
            format_sci(r.value / scale)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sci(0.029993), "2.99930000e-2");
        assert_eq!(format_sci(-1234.5), "-1.23450000e3");
        assert_eq!(format_sci(-0.0), "0.00000000e0");
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in ProfileQuantity::ALL {
            assert_eq!(q.name().parse::<ProfileQuantity>().unwrap(), q);
        }
        assert!("tau".parse::<ProfileQuantity>().is_err());
    }
}
