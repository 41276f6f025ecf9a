use num_traits::One;

use super::GeneratorError;
use crate::surface::{FaceId, Length, SlotRef, Surface};

/// One sector is a closed strip of seven faces running once around the
/// tube: triangle, three squares, triangle, heptagon, heptagon.
const STRIP: [usize; 7] = [3, 4, 4, 4, 3, 7, 7];

/// Per strip face, how many slots face the next sector (right) and the
/// previous one (left). The remaining two slots are the rungs shared with
/// the strip neighbours.
const SPLIT: [(usize, usize); 7] = [(0, 1), (1, 1), (1, 1), (1, 1), (1, 0), (3, 2), (2, 3)];

/// Right slot `j` of a sector meets left slot `j + OFFSET` of the next one.
const OFFSET: usize = 7;

const SEAM: usize = 9;

/// The 9-sector torus of triangles, squares and heptagons: heptagons carry
/// the excess on the inner rim, triangles the defect on the outer rim.
pub fn torus_9fold() -> Surface {
    torus_sectors(9).expect("9 sectors")
}

/// The sector torus with any number of sectors, `V = 9s`, `E = 16s`, `F = 7s`.
/// Sector slot tables are a reconstruction that matches the published tally.
pub fn torus_sectors(sectors: usize) -> Result<Surface, GeneratorError> {
    if sectors < 3 {
        return Err(GeneratorError::TooFewSectors(sectors));
    }
    let mut s = Surface::new();
    let ids: Vec<Vec<FaceId>> = (0..sectors)
        .map(|_| STRIP.iter().map(|&n| s.add_face(n, Length::one()).unwrap()).collect())
        .collect();
    let k = STRIP.len();
    for sector in &ids {
        for f in 0..k {
            let top = SPLIT[f].0 + 1;
            s.glue(SlotRef::new(sector[f], top), SlotRef::new(sector[(f + 1) % k], 0), false).unwrap();
        }
    }
    for i in 0..sectors {
        let next = &ids[(i + 1) % sectors];
        let mut rights = Vec::with_capacity(SEAM);
        let mut lefts = Vec::with_capacity(SEAM);
        for f in 0..k {
            let (r, l) = SPLIT[f];
            rights.extend((0..r).map(|j| SlotRef::new(ids[i][f], 1 + j)));
            // Left slots run downward in slot order, so upward is reversed.
            lefts.extend((0..l).map(|j| SlotRef::new(next[f], r + 1 + l - j)));
        }
        for j in 0..SEAM {
            s.glue(rights[j], lefts[(j + OFFSET) % SEAM], false).unwrap();
        }
    }
    Ok(s)
}
