//! The four ground-truth heatmaps for one blurred ball, printed as ASCII.

use blurtrack::heatmap::{binary_blur_map, binary_disk_map, real_blur_map, real_disk_map};
use blurtrack::{BlurLabel, Heatmap, HeatmapParams, Point2, RasterSize};

fn ascii(map: &Heatmap) -> String {
    let ramp = [' ', '.', ':', '+', '#'];
    let mut out = String::new();
    for y in 0..map.height() {
        for x in 0..map.width() {
            let v = map.get(x, y);
            out.push(if v == 0.0 {
                ' '
            } else {
                ramp[1 + ((v * 3.0).round() as usize).min(3)]
            });
        }
        out.push('\n');
    }
    out
}

pub fn run() -> Vec<(&'static str, usize)> {
    let size = RasterSize::new(40, 16);
    let params = HeatmapParams::default();
    let label = BlurLabel::new(Point2::new(20.0, 8.0), 20f64.to_radians(), 9.0);
    let seg = label.endpoints();
    let maps = [
        (
            "binary disk",
            binary_disk_map(label.center, &params, size).unwrap(),
        ),
        ("binary blur", binary_blur_map(&seg, &params, size).unwrap()),
        (
            "real disk",
            real_disk_map(label.center, &params, size).unwrap(),
        ),
        ("real blur", real_blur_map(&seg, &params, size).unwrap()),
    ];
    let mut support = Vec::new();
    for (name, map) in &maps {
        println!(
            "{name}: {} pixels, peak {:.2}",
            map.support(),
            map.max_value()
        );
        print!("{}", ascii(map));
        support.push((*name, map.support()));
    }
    support
}

#[allow(dead_code)]
fn main() {
    run();
}
