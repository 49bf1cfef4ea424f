use std::time::Instant;

use super::metrics::rmse_by_class;
use super::report::FrameRecord;
use crate::detector::MapSnapshot;
use crate::elevmap::{fuse_frame, fuse_range_image, FusionStats, PyramidMap};
use crate::simworld::{fly, CameraModel, FlightPlan, Frame, RenderOptions, TerrainModel};
use crate::Result;

/// One simulated flight feeding one or more maps with the same frames.
pub(crate) struct Flight<'a> {
    pub terrain: &'a TerrainModel,
    pub plan: &'a FlightPlan,
    pub camera: &'a CameraModel,
    pub render: RenderOptions,
    pub seed: u64,
    /// Let the maps roll under the camera; otherwise they stay put and drop
    /// points that fall outside.
    pub recenter: bool,
    /// Compute per-class RMSE of the first map after every frame.
    pub track_rmse: bool,
}

pub(crate) fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

impl Flight<'_> {
    /// Renders every frame and fuses it into all `maps`. `after_frame` runs
    /// once the frame is fused and may fill in more of the record.
    pub fn run(
        &self,
        maps: &mut [PyramidMap],
        mut after_frame: impl FnMut(&Frame, &[PyramidMap], &mut FrameRecord) -> Result<()>,
    ) -> Result<Vec<FrameRecord>> {
        let mut records = Vec::new();
        let mut frames = fly(self.terrain, self.plan, self.camera, self.seed, &self.render);
        loop {
            let t0 = Instant::now();
            let Some(frame) = frames.next() else { break };
            let frame = frame?;
            let render_ms = ms_since(t0);

            let mut first: Option<(FusionStats, f64)> = None;
            for map in maps.iter_mut() {
                let t1 = Instant::now();
                let stats = if self.recenter {
                    fuse_frame(map, &frame.image, &frame.pose, self.camera)
                } else {
                    fuse_range_image(map, &frame.image, &frame.pose, self.camera)
                };
                let ms = ms_since(t1);
                first.get_or_insert((stats, ms));
            }
            let (stats, fuse_ms) = first.unwrap_or_default();

            let p = frame.pose.position;
            let ground = self
                .terrain
                .sample_height(p.x, p.y)
                .unwrap_or_else(|_| self.terrain.plane_height(p.x, p.y));
            let mut rec = FrameRecord {
                seed: self.seed,
                frame: frame.index,
                timestamp: frame.pose.timestamp,
                altitude_agl: p.z - ground,
                render_ms,
                fuse_ms,
                fused_points: stats.fused_points,
                updated_cells: stats.total_updated_cells(),
                points_per_level: stats.points_per_level.clone(),
                ..Default::default()
            };
            if self.track_rmse {
                if let Some(map) = maps.first() {
                    rec.rmse = rmse_by_class(&MapSnapshot::new(map), self.terrain);
                }
            }
            after_frame(&frame, maps, &mut rec)?;
            records.push(rec);
        }
        Ok(records)
    }
}
