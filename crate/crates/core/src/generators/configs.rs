use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::angle::AngleValue;
use crate::curvature::interior_angle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigClass {
    /// Angle sum below 360°.
    Convex,
    Flat,
    Hyperbolic,
}

impl ConfigClass {
    pub fn of(sum: AngleValue) -> Self {
        match sum.cmp(&AngleValue::degrees(360)) {
            std::cmp::Ordering::Less => ConfigClass::Convex,
            std::cmp::Ordering::Equal => ConfigClass::Flat,
            std::cmp::Ordering::Greater => ConfigClass::Hyperbolic,
        }
    }
}

impl fmt::Display for ConfigClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConfigClass::Convex => "convex",
            ConfigClass::Flat => "flat",
            ConfigClass::Hyperbolic => "hyperbolic",
        })
    }
}

impl FromStr for ConfigClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "convex" => Ok(ConfigClass::Convex),
            "flat" => Ok(ConfigClass::Flat),
            "hyperbolic" => Ok(ConfigClass::Hyperbolic),
            other => Err(format!("unknown config class `{other}`")),
        }
    }
}

/// A multiset of polygon side counts meeting at one vertex, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexConfig {
    pub sides: Vec<usize>,
    pub angle_sum: AngleValue,
    pub class: ConfigClass,
}

impl VertexConfig {
    /// Panics on fewer than 3 polygons or on polygons with fewer than 3 sides.
    pub fn new(mut sides: Vec<usize>) -> Self {
        assert!(sides.len() >= 3, "a vertex needs at least 3 faces");
        sides.sort_unstable();
        let angle_sum = sides.iter().map(|&n| interior_angle(n).expect("n >= 3")).sum();
        VertexConfig { sides, angle_sum, class: ConfigClass::of(angle_sum) }
    }

    pub fn defect(&self) -> AngleValue {
        AngleValue::degrees(360) - self.angle_sum
    }

    pub fn is_uniform(&self) -> bool {
        self.sides.windows(2).all(|w| w[0] == w[1])
    }

    /// `720° / defect` when that is a whole number: the vertex count of a
    /// closed sphere-like surface where every vertex has this config.
    pub fn predicted_vertices(&self) -> Option<u64> {
        let d = self.defect();
        if !d.is_positive() {
            return None;
        }
        let q = AngleValue::degrees(720).rational() / d.rational();
        q.is_integer().then(|| *q.numer() as u64)
    }
}

impl fmt::Display for VertexConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sides.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

struct Enumerator {
    class: ConfigClass,
    max_sides: usize,
    max_count: usize,
    stack: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl Enumerator {
    fn rec(&mut self, sum: AngleValue, min: usize) {
        if self.stack.len() >= 3 && ConfigClass::of(sum) == self.class {
            self.out.push(self.stack.clone());
        }
        if self.stack.len() == self.max_count {
            return;
        }
        for n in min..=self.max_sides {
            let next = sum + interior_angle(n).unwrap();
            // Angles grow with side count, so once a partial sum padded with
            // triangles passes 360° no extension can be convex or flat.
            if self.class != ConfigClass::Hyperbolic {
                let pad = AngleValue::degrees(60) * 3usize.saturating_sub(self.stack.len() + 1) as i64;
                if next + pad > AngleValue::degrees(360) {
                    break;
                }
            }
            self.stack.push(n);
            self.rec(next, n);
            self.stack.pop();
        }
    }
}

/// Every multiset of `3..=max_count` polygons with `3..=max_sides` sides
/// whose angle sum falls in `class`, in lexicographic order.
pub fn enumerate_vertex_configs(class: ConfigClass, max_sides: usize, max_count: usize) -> Vec<VertexConfig> {
    let mut e = Enumerator { class, max_sides, max_count, stack: Vec::with_capacity(max_count), out: Vec::new() };
    e.rec(AngleValue::ZERO, 3);
    let mut out = e.out;
    out.sort();
    out.into_iter().map(VertexConfig::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_flat_members() {
        let flat = enumerate_vertex_configs(ConfigClass::Flat, 42, 6);
        let as_sides: Vec<Vec<usize>> = flat.iter().map(|c| c.sides.clone()).collect();
        assert!(as_sides.contains(&vec![3, 7, 42]));
        assert!(as_sides.contains(&vec![6, 6, 6]));
        assert!(as_sides.contains(&vec![3, 3, 3, 3, 3, 3]));
        assert_eq!(flat, enumerate_vertex_configs(ConfigClass::Flat, 42, 6));
    }

    #[test]
    fn uniform_convex_are_platonic() {
        let uniform: Vec<Vec<usize>> = enumerate_vertex_configs(ConfigClass::Convex, 42, 6)
            .into_iter()
            .filter(VertexConfig::is_uniform)
            .map(|c| c.sides)
            .collect();
        assert_eq!(uniform, vec![vec![3, 3, 3], vec![3, 3, 3, 3], vec![3, 3, 3, 3, 3], vec![4, 4, 4], vec![5, 5, 5]]);
    }

    #[test]
    fn hyperbolic_boundary() {
        let h: Vec<Vec<usize>> = enumerate_vertex_configs(ConfigClass::Hyperbolic, 7, 3)
            .into_iter()
            .filter(VertexConfig::is_uniform)
            .map(|c| c.sides)
            .collect();
        assert!(h.contains(&vec![7, 7, 7]));
        assert!(!h.contains(&vec![6, 6, 6]));
    }

    #[test]
    fn predicted_counts() {
        assert_eq!(VertexConfig::new(vec![5, 6, 6]).predicted_vertices(), Some(60));
        assert_eq!(VertexConfig::new(vec![3, 3, 3, 3, 4]).predicted_vertices(), Some(24));
        assert_eq!(VertexConfig::new(vec![6, 6, 6]).predicted_vertices(), None);
    }
}
