//! Through-thickness stacking: layer interfaces and material at any `z`.

use crate::error::{Error, Result};
use crate::materials::{
    constitutive, ConstitutiveMatrix, CoreMaterial, GradingRule, MaterialPoint, Nanocomposite, StretchClosure,
};

/// Which side of an interface a query at exactly that `z` refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

/// CNT distribution law selected by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Distribution {
    #[serde(rename = "UD")]
    Uniform,
    #[serde(rename = "FG-V")]
    FgV,
    #[serde(rename = "FG-X")]
    FgX,
}

impl Distribution {
    pub fn label(&self) -> &'static str {
        match self {
            Distribution::Uniform => "UD",
            Distribution::FgV => "FG-V",
            Distribution::FgX => "FG-X",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerMaterial {
    Homogeneous(CoreMaterial),
    Reinforced { composite: Nanocomposite, grading: GradingRule },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub bottom: f64,
    pub top: f64,
    pub material: LayerMaterial,
}

impl Layer {
    pub fn thickness(&self) -> f64 {
        self.top - self.bottom
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.top + self.bottom)
    }

    pub fn material_at(&self, z: f64, t: f64) -> Result<MaterialPoint> {
        match &self.material {
            LayerMaterial::Homogeneous(core) => core.point(t),
            LayerMaterial::Reinforced { composite, grading } => {
                composite.properties(grading.volume_fraction(z)?, t)
            }
        }
    }

    /// CNT volume fraction, zero for homogeneous layers.
    pub fn volume_fraction(&self, z: f64) -> Result<f64> {
        match &self.material {
            LayerMaterial::Homogeneous(_) => Ok(0.0),
            LayerMaterial::Reinforced { grading, .. } => grading.volume_fraction(z),
        }
    }
}

/// Layers stacked bottom to top over `[-h/2, h/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layup {
    layers: Vec<Layer>,
}

impl Layup {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Domain("layup needs at least one layer".into()));
        }
        for l in &layers {
            if !(l.thickness() > 0.0) {
                return Err(Error::Domain(format!("layer [{}, {}] has no thickness", l.bottom, l.top)));
            }
        }
        let h = layers.last().unwrap().top - layers[0].bottom;
        for w in layers.windows(2) {
            if (w[1].bottom - w[0].top).abs() > 1e-12 * h {
                return Err(Error::Domain("layers must be contiguous".into()));
            }
        }
        if (layers[0].bottom + layers.last().unwrap().top).abs() > 1e-12 * h {
            return Err(Error::Domain("layup must be centred on z = 0".into()));
        }
        Ok(Self { layers })
    }

    /// One reinforced layer of thickness `h`.
    pub fn single(h: f64, composite: Nanocomposite, distribution: Distribution) -> Result<Self> {
        let v_star = composite.v_star;
        let (bottom, top) = (-0.5 * h, 0.5 * h);
        let grading = match distribution {
            Distribution::Uniform => GradingRule::Uniform { v_star },
            Distribution::FgV => GradingRule::LinearV { v_star, bottom, top },
            Distribution::FgX => GradingRule::LinearX { v_star, bottom, top },
        };
        Self::new(vec![Layer {
            bottom,
            top,
            material: LayerMaterial::Reinforced { composite, grading },
        }])
    }

    /// Homogeneous core between two reinforced facesheets, `h = h_core + 2 h_face`.
    ///
    /// FG-X grades each facesheet from zero at the core to `2 V*` at the skin.
    /// FG-V grades each facesheet from zero at its lower face to `2 V*` at its upper face.
    pub fn sandwich(
        h: f64,
        core_to_face: f64,
        core: CoreMaterial,
        composite: Nanocomposite,
        distribution: Distribution,
    ) -> Result<Self> {
        if !(core_to_face > 0.0) {
            return Err(Error::Domain(format!("core-to-face ratio {core_to_face} must be positive")));
        }
        let hf = h / (core_to_face + 2.0);
        let t = [-0.5 * h, -0.5 * h + hf, 0.5 * h - hf, 0.5 * h];
        let v_star = composite.v_star;
        let face = |bottom: f64, top: f64, inner: f64, outer: f64| -> GradingRule {
            match distribution {
                Distribution::Uniform => GradingRule::Uniform { v_star },
                Distribution::FgV => GradingRule::LinearV { v_star, bottom, top },
                Distribution::FgX => GradingRule::Facesheet { v_star, inner, outer },
            }
        };
        Self::new(vec![
            Layer {
                bottom: t[0],
                top: t[1],
                material: LayerMaterial::Reinforced {
                    composite: composite.clone(),
                    grading: face(t[0], t[1], t[1], t[0]),
                },
            },
            Layer {
                bottom: t[1],
                top: t[2],
                material: LayerMaterial::Homogeneous(core),
            },
            Layer {
                bottom: t[2],
                top: t[3],
                material: LayerMaterial::Reinforced {
                    composite,
                    grading: face(t[2], t[3], t[2], t[3]),
                },
            },
        ])
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn thickness(&self) -> f64 {
        self.layers.last().unwrap().top - self.layers[0].bottom
    }

    /// Interface coordinates `t0 < t1 < ... < tn`, including both surfaces.
    pub fn interfaces(&self) -> Vec<f64> {
        std::iter::once(self.layers[0].bottom)
            .chain(self.layers.iter().map(|l| l.top))
            .collect()
    }

    /// Index of the layer holding `z`. A `z` on an internal interface needs `side`.
    pub fn layer_index(&self, z: f64, side: Option<Side>) -> Result<usize> {
        let h = self.thickness();
        let tol = 1e-12 * h;
        if z < -0.5 * h - tol || z > 0.5 * h + tol {
            return Err(Error::Domain(format!("z = {z} outside plate thickness [{}, {}]", -0.5 * h, 0.5 * h)));
        }
        for (k, w) in self.layers.windows(2).enumerate() {
            let zi = w[0].top;
            if (z - zi).abs() <= tol {
                return match side {
                    Some(Side::Below) => Ok(k),
                    Some(Side::Above) => Ok(k + 1),
                    None => Err(Error::Domain(format!("z = {z} lies on interface {}; pick a side", k + 1))),
                };
            }
        }
        Ok(self
            .layers
            .iter()
            .position(|l| z <= l.top + tol)
            .unwrap_or(self.layers.len() - 1))
    }

    pub fn material_at(&self, z: f64, side: Option<Side>, t: f64) -> Result<MaterialPoint> {
        let k = self.layer_index(z, side)?;
        self.layers[k].material_at(z.clamp(self.layers[k].bottom, self.layers[k].top), t)
    }

    pub fn constitutive_at(
        &self,
        z: f64,
        side: Option<Side>,
        t: f64,
        closure: StretchClosure,
    ) -> Result<ConstitutiveMatrix> {
        constitutive(&self.material_at(z, side, t)?, closure)
    }

    pub fn volume_fraction(&self, z: f64, side: Option<Side>) -> Result<f64> {
        let k = self.layer_index(z, side)?;
        self.layers[k].volume_fraction(z.clamp(self.layers[k].bottom, self.layers[k].top))
    }
}
