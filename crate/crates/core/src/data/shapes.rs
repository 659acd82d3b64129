//! Procedural furniture families sampled uniformly by surface area.
//!
//! All shapes stand on the `y = 0` plane with `y` pointing up and are
//! centred on the `y` axis. Units are arbitrary (roughly metres); clouds are
//! normalized before they reach the model.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Point, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeFamily {
    BoxChair,
    Table,
    Lamp,
}

impl ShapeFamily {
    pub const ALL: [ShapeFamily; 3] =
        [ShapeFamily::BoxChair, ShapeFamily::Table, ShapeFamily::Lamp];

    pub fn name(self) -> &'static str {
        match self {
            ShapeFamily::BoxChair => "box-chair",
            ShapeFamily::Table => "table",
            ShapeFamily::Lamp => "lamp",
        }
    }
}

impl fmt::Display for ShapeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown shape family {s:?} (expected box-chair, table or lamp)"
                ))
            })
    }
}

/// Chair: box seat on four cylindrical legs, a slab back, optional armrests
/// that sit outside the seat's width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChairParams {
    /// [0.40, 0.60]
    pub seat_width: f64,
    /// [0.40, 0.60]
    pub seat_depth: f64,
    /// Height of the seat's top face, [0.40, 0.50]
    pub seat_height: f64,
    /// [0.03, 0.08]
    pub seat_thickness: f64,
    /// [0.02, 0.04]
    pub leg_radius: f64,
    /// Height of the back above the seat, [0.30, 0.60]
    pub back_height: f64,
    pub armrests: bool,
    /// Armrest top above the seat, [0.15, 0.25]
    pub armrest_height: f64,
}

/// Table: slab top on four cylindrical legs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableParams {
    /// [0.80, 1.40]
    pub top_width: f64,
    /// [0.50, 0.90]
    pub top_depth: f64,
    /// [0.60, 0.80]
    pub height: f64,
    /// [0.03, 0.06]
    pub top_thickness: f64,
    /// [0.02, 0.05]
    pub leg_radius: f64,
}

/// Lamp: disc base, thin pole, open conical shade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LampParams {
    /// [0.10, 0.20]
    pub base_radius: f64,
    /// [0.02, 0.05]
    pub base_height: f64,
    /// [0.010, 0.025]
    pub pole_radius: f64,
    /// [0.50, 1.00]
    pub pole_height: f64,
    /// [0.15, 0.30]
    pub shade_bottom_radius: f64,
    /// [0.05, 0.15]
    pub shade_top_radius: f64,
    /// [0.15, 0.30]
    pub shade_height: f64,
}

pub const ARMREST_WIDTH: f64 = 0.05;
const ARMREST_BAR: f64 = 0.04;
const BACK_THICKNESS: f64 = 0.04;
const TABLE_LEG_INSET: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ShapeParams {
    BoxChair(ChairParams),
    Table(TableParams),
    Lamp(LampParams),
}

fn check(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "{name} = {value} outside [{lo}, {hi}]"
        )))
    }
}

impl ShapeParams {
    pub fn family(&self) -> ShapeFamily {
        match self {
            ShapeParams::BoxChair(_) => ShapeFamily::BoxChair,
            ShapeParams::Table(_) => ShapeFamily::Table,
            ShapeParams::Lamp(_) => ShapeFamily::Lamp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ShapeParams::BoxChair(p) => {
                check("seat_width", p.seat_width, 0.40, 0.60)?;
                check("seat_depth", p.seat_depth, 0.40, 0.60)?;
                check("seat_height", p.seat_height, 0.40, 0.50)?;
                check("seat_thickness", p.seat_thickness, 0.03, 0.08)?;
                check("leg_radius", p.leg_radius, 0.02, 0.04)?;
                check("back_height", p.back_height, 0.30, 0.60)?;
                check("armrest_height", p.armrest_height, 0.15, 0.25)
            }
            ShapeParams::Table(p) => {
                check("top_width", p.top_width, 0.80, 1.40)?;
                check("top_depth", p.top_depth, 0.50, 0.90)?;
                check("height", p.height, 0.60, 0.80)?;
                check("top_thickness", p.top_thickness, 0.03, 0.06)?;
                check("leg_radius", p.leg_radius, 0.02, 0.05)
            }
            ShapeParams::Lamp(p) => {
                check("base_radius", p.base_radius, 0.10, 0.20)?;
                check("base_height", p.base_height, 0.02, 0.05)?;
                check("pole_radius", p.pole_radius, 0.010, 0.025)?;
                check("pole_height", p.pole_height, 0.50, 1.00)?;
                check("shade_bottom_radius", p.shade_bottom_radius, 0.15, 0.30)?;
                check("shade_top_radius", p.shade_top_radius, 0.05, 0.15)?;
                check("shade_height", p.shade_height, 0.15, 0.30)
            }
        }
    }

    /// Draws parameters uniformly from the family's documented ranges.
    pub fn sample<R: Rng + ?Sized>(family: ShapeFamily, rng: &mut R) -> Self {
        let mut u = |lo: f64, hi: f64| rng.random_range(lo..=hi);
        match family {
            ShapeFamily::BoxChair => {
                let p = ChairParams {
                    seat_width: u(0.40, 0.60),
                    seat_depth: u(0.40, 0.60),
                    seat_height: u(0.40, 0.50),
                    seat_thickness: u(0.03, 0.08),
                    leg_radius: u(0.02, 0.04),
                    back_height: u(0.30, 0.60),
                    armrests: false,
                    armrest_height: u(0.15, 0.25),
                };
                ShapeParams::BoxChair(ChairParams {
                    armrests: rng.random_bool(0.5),
                    ..p
                })
            }
            ShapeFamily::Table => ShapeParams::Table(TableParams {
                top_width: u(0.80, 1.40),
                top_depth: u(0.50, 0.90),
                height: u(0.60, 0.80),
                top_thickness: u(0.03, 0.06),
                leg_radius: u(0.02, 0.05),
            }),
            ShapeFamily::Lamp => ShapeParams::Lamp(LampParams {
                base_radius: u(0.10, 0.20),
                base_height: u(0.02, 0.05),
                pole_radius: u(0.010, 0.025),
                pole_height: u(0.50, 1.00),
                shade_bottom_radius: u(0.15, 0.30),
                shade_top_radius: u(0.05, 0.15),
                shade_height: u(0.15, 0.30),
            }),
        }
    }

    fn surfaces(&self) -> Vec<Surface> {
        match *self {
            ShapeParams::BoxChair(p) => chair_surfaces(&p),
            ShapeParams::Table(p) => table_surfaces(&p),
            ShapeParams::Lamp(p) => lamp_surfaces(&p),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Surface {
    /// Closed axis-aligned box.
    Cuboid { min: Point, max: Point },
    /// Closed vertical cylinder standing on `(x, y0, z)`.
    Cylinder {
        x: f64,
        z: f64,
        y0: f64,
        height: f64,
        radius: f64,
    },
    /// Open lateral surface of a vertical truncated cone.
    Frustum { y0: f64, r0: f64, y1: f64, r1: f64 },
}

fn cuboid(x: (f64, f64), y: (f64, f64), z: (f64, f64)) -> Surface {
    Surface::Cuboid {
        min: [x.0.min(x.1), y.0.min(y.1), z.0.min(z.1)],
        max: [x.0.max(x.1), y.0.max(y.1), z.0.max(z.1)],
    }
}

impl Surface {
    fn area(&self) -> f64 {
        match *self {
            Surface::Cuboid { min, max } => {
                let [a, b, c] = [max[0] - min[0], max[1] - min[1], max[2] - min[2]];
                2.0 * (a * b + b * c + c * a)
            }
            Surface::Cylinder { height, radius, .. } => {
                TAU * radius * height + TAU * radius * radius
            }
            Surface::Frustum { y0, r0, y1, r1 } => {
                PI * (r0 + r1) * ((r0 - r1).powi(2) + (y1 - y0).powi(2)).sqrt()
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Surface::Cuboid { min, max } => {
                let ext = [max[0] - min[0], max[1] - min[1], max[2] - min[2]];
                // face pairs normal to x, y, z weighted by their area
                let areas = [ext[1] * ext[2], ext[0] * ext[2], ext[0] * ext[1]];
                let axis = pick(rng, &areas);
                let mut p: Point = std::array::from_fn(|c| lerp(min[c], max[c], rng.random()));
                p[axis] = if rng.random_bool(0.5) {
                    min[axis]
                } else {
                    max[axis]
                };
                p
            }
            Surface::Cylinder {
                x,
                z,
                y0,
                height,
                radius,
            } => {
                let side = TAU * radius * height;
                let cap = PI * radius * radius;
                let theta = rng.random_range(0.0..TAU);
                match pick(rng, &[side, cap, cap]) {
                    0 => [
                        x + radius * theta.cos(),
                        lerp(y0, y0 + height, rng.random()),
                        z + radius * theta.sin(),
                    ],
                    face => {
                        let r = radius * rng.random::<f64>().sqrt();
                        let y = if face == 1 { y0 } else { y0 + height };
                        [x + r * theta.cos(), y, z + r * theta.sin()]
                    }
                }
            }
            Surface::Frustum { y0, r0, y1, r1 } => {
                // Area density along the slant is proportional to the radius.
                let u: f64 = rng.random();
                let s = if (r1 - r0).abs() < 1e-12 {
                    u
                } else {
                    let a = (r1 - r0) / 2.0;
                    let b = r0;
                    let c = -u * (r0 + r1) / 2.0;
                    ((-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)).clamp(0.0, 1.0)
                };
                let r = r0 + (r1 - r0) * s;
                let theta = rng.random_range(0.0..TAU);
                [r * theta.cos(), y0 + (y1 - y0) * s, r * theta.sin()]
            }
        }
    }
}

fn lerp(lo: f64, hi: f64, t: f64) -> f64 {
    (lo + (hi - lo) * t).clamp(lo, hi)
}

/// Index drawn with probability proportional to `weights`.
fn pick<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if target < *w {
            return i;
        }
        target -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

fn chair_surfaces(p: &ChairParams) -> Vec<Surface> {
    let (hw, hd, top) = (p.seat_width / 2.0, p.seat_depth / 2.0, p.seat_height);
    let seat_bottom = top - p.seat_thickness;
    let mut s = vec![
        cuboid((-hw, hw), (seat_bottom, top), (-hd, hd)),
        cuboid(
            (-hw, hw),
            (top, top + p.back_height),
            (-hd, -hd + BACK_THICKNESS),
        ),
    ];
    for (sx, sz) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
        s.push(Surface::Cylinder {
            x: sx * (hw - p.leg_radius),
            z: sz * (hd - p.leg_radius),
            y0: 0.0,
            height: seat_bottom,
            radius: p.leg_radius,
        });
    }
    if p.armrests {
        let arm_top = top + p.armrest_height;
        for side in [-1.0, 1.0] {
            let x = (side * hw, side * (hw + ARMREST_WIDTH));
            s.push(cuboid(x, (arm_top - ARMREST_BAR, arm_top), (-hd, hd)));
            s.push(cuboid(
                x,
                (top, arm_top - ARMREST_BAR),
                (hd - ARMREST_WIDTH, hd),
            ));
        }
    }
    s
}

fn table_surfaces(p: &TableParams) -> Vec<Surface> {
    let (hw, hd) = (p.top_width / 2.0, p.top_depth / 2.0);
    let under = p.height - p.top_thickness;
    let mut s = vec![cuboid((-hw, hw), (under, p.height), (-hd, hd))];
    for (sx, sz) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
        s.push(Surface::Cylinder {
            x: sx * (hw - TABLE_LEG_INSET - p.leg_radius),
            z: sz * (hd - TABLE_LEG_INSET - p.leg_radius),
            y0: 0.0,
            height: under,
            radius: p.leg_radius,
        });
    }
    s
}

fn lamp_surfaces(p: &LampParams) -> Vec<Surface> {
    let pole_top = p.base_height + p.pole_height;
    vec![
        Surface::Cylinder {
            x: 0.0,
            z: 0.0,
            y0: 0.0,
            height: p.base_height,
            radius: p.base_radius,
        },
        Surface::Cylinder {
            x: 0.0,
            z: 0.0,
            y0: p.base_height,
            height: p.pole_height,
            radius: p.pole_radius,
        },
        Surface::Frustum {
            y0: pole_top - p.shade_height,
            r0: p.shade_bottom_radius,
            y1: pole_top,
            r1: p.shade_top_radius,
        },
    ]
}

/// Samples `n` surface points, deterministic per `(params, n, seed)`.
pub fn generate_shape(params: &ShapeParams, n: usize, seed: u64) -> Result<PointCloud> {
    params.validate()?;
    if n == 0 {
        return Err(Error::config("point count must be at least 1"));
    }
    let surfaces = params.surfaces();
    let areas: Vec<f64> = surfaces.iter().map(Surface::area).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| surfaces[pick(&mut rng, &areas)].sample(&mut rng))
        .collect();
    PointCloud::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chair(armrests: bool) -> ShapeParams {
        ShapeParams::BoxChair(ChairParams {
            seat_width: 0.5,
            seat_depth: 0.5,
            seat_height: 0.45,
            seat_thickness: 0.05,
            leg_radius: 0.03,
            back_height: 0.4,
            armrests,
            armrest_height: 0.2,
        })
    }

    #[test]
    fn deterministic() {
        let a = generate_shape(&chair(true), 500, 9).unwrap();
        let b = generate_shape(&chair(true), 500, 9).unwrap();
        assert!(a.bitwise_eq(&b));
        let c = generate_shape(&chair(true), 500, 10).unwrap();
        assert!(!a.bitwise_eq(&c));
    }

    #[test]
    fn armrest_band() {
        let with = generate_shape(&chair(true), 2000, 1).unwrap();
        let without = generate_shape(&chair(false), 2000, 1).unwrap();
        assert!(!with.bitwise_eq(&without));
        let in_band = |p: &Point| p[0].abs() > 0.25 && p[1] > 0.45;
        assert!(without.points().iter().all(|p| !in_band(p)));
        assert!(with.points().iter().any(in_band));
    }

    #[test]
    fn single_point() {
        let one = generate_shape(&chair(false), 1, 3).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn out_of_range_params() {
        let bad = ShapeParams::Table(TableParams {
            top_width: 3.0,
            top_depth: 0.6,
            height: 0.7,
            top_thickness: 0.04,
            leg_radius: 0.03,
        });
        assert!(matches!(generate_shape(&bad, 10, 0), Err(Error::Config(_))));
        assert!(generate_shape(&chair(false), 0, 0).is_err());
    }

    #[test]
    fn sampled_params_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for family in ShapeFamily::ALL {
            for _ in 0..50 {
                let p = ShapeParams::sample(family, &mut rng);
                p.validate().unwrap();
                assert_eq!(p.family(), family);
            }
        }
    }

    #[test]
    fn lamp_points_on_surfaces() {
        let params = ShapeParams::Lamp(LampParams {
            base_radius: 0.15,
            base_height: 0.03,
            pole_radius: 0.02,
            pole_height: 0.7,
            shade_bottom_radius: 0.2,
            shade_top_radius: 0.1,
            shade_height: 0.2,
        });
        let cloud = generate_shape(&params, 1000, 4).unwrap();
        for p in cloud.points() {
            let r = (p[0] * p[0] + p[2] * p[2]).sqrt();
            assert!(p[1] >= -1e-12 && p[1] <= 0.73 + 1e-12);
            assert!(r <= 0.2 + 1e-9);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in ShapeFamily::ALL {
            assert_eq!(f.name().parse::<ShapeFamily>().unwrap(), f);
        }
        assert!("sofa".parse::<ShapeFamily>().is_err());
    }
}
