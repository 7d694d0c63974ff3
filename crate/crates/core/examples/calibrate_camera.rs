//! Recover focal length and pose from the six table keypoints.

use blurtrack::camera::{calibrate_pnp, project, table_keypoints, Keypoint2D3D};
use blurtrack::synth::broadcast_camera;
use blurtrack::Point2;

pub fn run() -> (f64, f64) {
    let (width, height) = (1280, 720);
    let truth = broadcast_camera(width, height);
    // Annotators click to within about half a pixel.
    let jitter = [
        (0.3, -0.2),
        (-0.4, 0.1),
        (0.2, 0.4),
        (-0.1, -0.3),
        (0.4, 0.2),
        (-0.3, -0.4),
    ];
    let keypoints: Vec<Keypoint2D3D> = table_keypoints()
        .iter()
        .zip(jitter)
        .map(|(world, (dx, dy))| Keypoint2D3D {
            world: *world,
            image: project(&truth, *world).expect("table in view") + Point2::new(dx, dy),
        })
        .collect();
    let calibration = calibrate_pnp(&keypoints, None, width, height).expect("calibration");
    let cam = calibration.camera;
    println!("true focal      {:.1} px", truth.focal);
    println!("fitted focal    {:.1} px", cam.focal);
    println!("camera center   {:.2?} m", cam.center());
    println!("rms             {:.3} px", calibration.rms);
    (cam.focal / truth.focal - 1.0, calibration.rms)
}

#[allow(dead_code)]
fn main() {
    run();
}
