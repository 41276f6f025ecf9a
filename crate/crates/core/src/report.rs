//! Analysis documents: one structure rendered as text for people and JSON
//! for programs.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::angle::AngleDoc;
use crate::curvature::{analyze, CurvatureAnalysis};
use crate::surface::{Surface, VertexKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisDoc {
    pub counts: Counts,
    pub chi: i64,
    pub closed: bool,
    pub orientable: bool,
    pub genus: Option<i64>,
    pub total_defect: AngleDoc,
    /// "holds" or "fails" on closed surfaces, "n/a" with boundary.
    pub descartes: &'static str,
    pub boundary_loops: usize,
    pub total_turning: AngleDoc,
    pub configs: Vec<ConfigRow>,
    pub vertices: Vec<VertexRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub v: usize,
    pub e: usize,
    pub f: usize,
}

/// Vertices grouped by kind and sorted side counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigRow {
    pub kind: VertexKind,
    pub config: Vec<usize>,
    pub count: usize,
    pub value: AngleDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexRow {
    pub vertex: usize,
    pub kind: VertexKind,
    pub config: Vec<usize>,
    pub angle_sum: AngleDoc,
    /// Defect at interior vertices (negative is excess), turning on the boundary.
    pub value: AngleDoc,
}

impl AnalysisDoc {
    pub fn new(s: &Surface) -> Self {
        Self::from_analysis(&analyze(s))
    }

    pub fn from_analysis(a: &CurvatureAnalysis) -> Self {
        let t = &a.topology;
        let mut groups: BTreeMap<(u8, Vec<usize>), (usize, crate::AngleValue)> = BTreeMap::new();
        for v in &a.vertices {
            let mut key = v.config.clone();
            key.sort_unstable();
            let kind = (v.kind == VertexKind::Boundary) as u8;
            // Boundary turning depends only on the corners too, so the value is shared.
            groups.entry((kind, key)).or_insert((0, v.value)).0 += 1;
        }
        AnalysisDoc {
            counts: Counts { v: t.v, e: t.e, f: t.f },
            chi: t.chi,
            closed: t.closed,
            orientable: t.orientable,
            genus: t.genus,
            total_defect: t.total_defect.to_doc(),
            descartes: match t.descartes_holds {
                Some(true) => "holds",
                Some(false) => "fails",
                None => "n/a",
            },
            boundary_loops: t.boundary_loops,
            total_turning: t.total_turning.to_doc(),
            configs: groups
                .into_iter()
                .map(|((kind, config), (count, value))| ConfigRow {
                    kind: if kind == 0 { VertexKind::Interior } else { VertexKind::Boundary },
                    config,
                    count,
                    value: value.to_doc(),
                })
                .collect(),
            vertices: a
                .vertices
                .iter()
                .map(|v| VertexRow {
                    vertex: v.vertex,
                    kind: v.kind,
                    config: v.config.clone(),
                    angle_sum: v.angle_sum.to_doc(),
                    value: v.value.to_doc(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = self.counts;
        let _ = writeln!(out, "V={} E={} F={}", c.v, c.e, c.f);
        let _ = writeln!(out, "χ={}", self.chi);
        let _ = writeln!(out, "closed: {}", self.closed);
        let _ = writeln!(out, "orientable: {}", self.orientable);
        match self.genus {
            Some(g) => {
                let _ = writeln!(out, "genus: {g}");
            }
            None => out.push_str("genus: -\n"),
        }
        let _ = writeln!(out, "total defect: {}", self.total_defect.display);
        let _ = writeln!(out, "descartes: {}", self.descartes);
        if !self.closed {
            let _ = writeln!(out, "boundary loops: {}", self.boundary_loops);
            let _ = writeln!(out, "total turning: {}", self.total_turning.display);
        }
        out.push_str("\nconfig counts:\n");
        for row in &self.configs {
            let label = if row.kind == VertexKind::Interior { "defect" } else { "turning" };
            let _ = writeln!(out, "  {:<16} x{:<5} {label} {}", config_label(&row.config), row.count, row.value.display);
        }
        out.push_str("\nvertices:\n");
        for row in &self.vertices {
            let kind = if row.kind == VertexKind::Interior { "interior" } else { "boundary" };
            let _ = writeln!(
                out,
                "  {:>5} {kind:<8} {:<16} sum {:<12} {}",
                row.vertex,
                config_label(&row.config),
                row.angle_sum.display,
                row.value.display
            );
        }
        out
    }
}

fn config_label(c: &[usize]) -> String {
    let parts: Vec<String> = c.iter().map(|n| n.to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{football_disk, solid, torus_9fold, SolidId};

    #[test]
    fn torus_report() {
        let doc = AnalysisDoc::new(&torus_9fold());
        assert_eq!((doc.counts.v, doc.counts.e, doc.counts.f), (81, 144, 63));
        assert_eq!(doc.descartes, "holds");
        assert_eq!(doc.total_defect.exact, "0");
        let text = doc.to_text();
        assert!(text.contains("χ=0") && text.contains("total defect: 0°") && text.contains("descartes: holds"));
    }

    #[test]
    fn heptagon_ring_groups_interior_excess() {
        let doc = AnalysisDoc::new(&football_disk(7, 1));
        let interior: Vec<_> = doc.configs.iter().filter(|r| r.kind == VertexKind::Interior).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].count, 7);
        assert_eq!(interior[0].value.display, "-8 4/7°");
        assert_eq!(doc.descartes, "n/a");
    }

    #[test]
    fn json_is_stable() {
        let s = solid(SolidId::TruncatedIcosidodecahedron).unwrap();
        let a = AnalysisDoc::new(&s).to_json();
        assert_eq!(a, AnalysisDoc::new(&s).to_json());
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["counts"]["v"], 120);
        assert_eq!(v["configs"][0]["value"]["exact"], "6");
    }
}
