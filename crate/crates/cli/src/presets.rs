//! Named generator presets accepted by `--preset`.

use polytile_core::generators::{football_disk, solid, torus_9fold, torus_sectors, SolidId};
use polytile_core::Surface;

use crate::CommandError;

/// Largest ring count accepted for football patches; heptagon patches grow
/// exponentially.
pub const MAX_FOOTBALL_RINGS: usize = 6;

/// One line per preset family, for usage text.
pub const PRESET_HELP: &str = "\
  <solid>          platonic and archimedean names, e.g. cube, truncated-icosahedron
  prism-N          N-gonal prism (N >= 3)
  antiprism-N      N-gonal antiprism (N >= 3)
  elongated-square-gyrobicupola
  football-C-R     C-gon (5, 6 or 7) surrounded by R rings of hexagons
  torus-9fold      the 9-sector polygon torus; torus-Nfold for N sectors";

pub fn preset(name: &str) -> Result<Surface, CommandError> {
    let unknown = || CommandError::new("UnknownPreset", format!("unknown preset `{name}`"));
    let t = name.trim().to_ascii_lowercase();
    if let Some(rest) = t.strip_prefix("football-") {
        let (c, r) = rest.split_once('-').ok_or_else(unknown)?;
        let c: usize = c.parse().map_err(|_| unknown())?;
        let r: usize = r.parse().map_err(|_| unknown())?;
        if !(5..=7).contains(&c) {
            return Err(CommandError::new("UnknownPreset", format!("football center must have 5, 6 or 7 sides, not {c}")));
        }
        if r > MAX_FOOTBALL_RINGS {
            return Err(CommandError::new("UnknownPreset", format!("at most {MAX_FOOTBALL_RINGS} football rings")));
        }
        return Ok(football_disk(c, r));
    }
    if let Some(n) = t.strip_prefix("torus-").and_then(|r| r.strip_suffix("fold")) {
        let n: usize = n.parse().map_err(|_| unknown())?;
        return if n == 9 { Ok(torus_9fold()) } else { Ok(torus_sectors(n)?) };
    }
    match t.parse::<SolidId>() {
        Ok(id) => Ok(solid(id)?),
        Err(_) => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(preset("torus-9fold").unwrap().counts(), (81, 144, 63));
        assert_eq!(preset("football-7-1").unwrap().face_count(), 8);
        assert_eq!(preset("prism-6").unwrap().counts(), (12, 18, 8));
        assert_eq!(preset("Truncated-Icosahedron").unwrap().counts(), (60, 90, 32));
        assert_eq!(preset("football-8-1").unwrap_err().code, "UnknownPreset");
        assert_eq!(preset("prism-2").unwrap_err().code, "SidesTooSmall");
        assert_eq!(preset("blob").unwrap_err().code, "UnknownPreset");
    }
}
