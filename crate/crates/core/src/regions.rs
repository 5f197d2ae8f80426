//! Connected-component labeling (two-pass, union-find).

use alloc::vec;
use alloc::vec::Vec;

use crate::image::{LabelMask, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

/// Foreground components of a mask. Id 0 is background, ids `1..=count`
/// are components numbered in raster order of their first pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    ids: Raster<u32>,
    /// `sizes[k]` is the pixel count of region `k + 1`.
    sizes: Vec<usize>,
}

/// Inclusive pixel bounds of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl RegionMap {
    pub fn width(&self) -> usize {
        self.ids.width()
    }

    pub fn height(&self) -> usize {
        self.ids.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.ids.dims()
    }

    pub fn region_count(&self) -> usize {
        self.sizes.len()
    }

    /// Pixel count of region `id` (1-based).
    pub fn size(&self, id: u32) -> usize {
        self.sizes[id as usize - 1]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn ids(&self) -> &Raster<u32> {
        &self.ids
    }

    pub fn id_at(&self, x: usize, y: usize) -> u32 {
        *self.ids.get(x, y)
    }

    /// Mask of the single region `id`.
    pub fn region_mask(&self, id: u32) -> LabelMask {
        self.ids.map(|&v| v == id)
    }

    pub fn bounding_boxes(&self) -> Vec<BoundingBox> {
        let mut boxes: Vec<Option<BoundingBox>> = vec![None; self.sizes.len()];
        for (x, y, &id) in self.ids.enumerate() {
            if id == 0 {
                continue;
            }
            let b = &mut boxes[id as usize - 1];
            match b {
                None => {
                    *b = Some(BoundingBox {
                        x0: x,
                        y0: y,
                        x1: x,
                        y1: y,
                    })
                }
                Some(b) => {
                    b.x0 = b.x0.min(x);
                    b.x1 = b.x1.max(x);
                    b.y1 = b.y1.max(y);
                }
            }
        }
        boxes
            .into_iter()
            .map(|b| b.expect("every region has a pixel"))
            .collect()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Keeps the smaller root so that provisional label order follows the
    /// raster scan.
    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

pub fn connected_components(mask: &LabelMask, connectivity: Connectivity) -> RegionMap {
    let (w, h) = mask.dims();
    let m = mask.as_slice();
    let mut prov = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !m[i] {
                continue;
            }
            let mut label = 0u32;
            let visit = |j: usize, label: &mut u32, uf: &mut UnionFind| {
                let n = prov[j];
                if n != 0 {
                    *label = if *label == 0 { n } else { uf.union(*label, n) };
                }
            };
            if x > 0 {
                visit(i - 1, &mut label, &mut uf);
            }
            if y > 0 {
                visit(i - w, &mut label, &mut uf);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        visit(i - w - 1, &mut label, &mut uf);
                    }
                    if x + 1 < w {
                        visit(i - w + 1, &mut label, &mut uf);
                    }
                }
            }
            prov[i] = if label == 0 { uf.make() } else { label };
        }
    }

    // Second pass: resolve roots and renumber in order of first appearance.
    let mut final_id = vec![0u32; uf.parent.len()];
    let mut sizes = Vec::new();
    for p in prov.iter_mut() {
        if *p == 0 {
            continue;
        }
        let root = uf.find(*p) as usize;
        if final_id[root] == 0 {
            sizes.push(0);
            final_id[root] = sizes.len() as u32;
        }
        *p = final_id[root];
        sizes[*p as usize - 1] += 1;
    }

    RegionMap {
        ids: mask.with_data(prov),
        sizes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(w: usize, h: usize, bits: &[u8]) -> LabelMask {
        LabelMask::new(w, h, bits.iter().map(|&b| b != 0).collect()).unwrap()
    }

    #[test]
    fn empty_and_full() {
        let r = connected_components(
            &LabelMask::filled(4, 3, false).unwrap(),
            Connectivity::Eight,
        );
        assert_eq!(r.region_count(), 0);
        let r = connected_components(&LabelMask::filled(3, 3, true).unwrap(), Connectivity::Four);
        assert_eq!(r.region_count(), 1);
        assert_eq!(r.size(1), 9);
    }

    #[test]
    fn row_trace() {
        let r = connected_components(&mask(5, 1, &[1, 0, 1, 1, 0]), Connectivity::Four);
        assert_eq!(r.region_count(), 2);
        assert_eq!(r.sizes(), &[1, 2]);
        assert_eq!(r.ids().as_slice(), &[1, 0, 2, 2, 0]);
    }

    #[test]
    fn diagonal_depends_on_connectivity() {
        let m = mask(2, 2, &[1, 0, 0, 1]);
        assert_eq!(
            connected_components(&m, Connectivity::Four).region_count(),
            2
        );
        assert_eq!(
            connected_components(&m, Connectivity::Eight).region_count(),
            1
        );
    }

    #[test]
    fn u_shape_merges_late() {
        // Two arms that only join on the last row.
        #[rustfmt::skip]
        let m = mask(5, 3, &[
            1, 0, 0, 0, 1,
            1, 0, 0, 0, 1,
            1, 1, 1, 1, 1,
        ]);
        let r = connected_components(&m, Connectivity::Four);
        assert_eq!(r.region_count(), 1);
        assert_eq!(r.size(1), 9);
    }

    #[test]
    fn ids_follow_first_pixel_order() {
        #[rustfmt::skip]
        let m = mask(4, 3, &[
            0, 0, 0, 1,
            1, 0, 0, 1,
            1, 0, 0, 0,
        ]);
        let r = connected_components(&m, Connectivity::Eight);
        assert_eq!(r.id_at(3, 0), 1);
        assert_eq!(r.id_at(0, 1), 2);
        let b = r.bounding_boxes();
        assert_eq!(
            b[1],
            BoundingBox {
                x0: 0,
                y0: 1,
                x1: 0,
                y1: 2
            }
        );
    }
}
