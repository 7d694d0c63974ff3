//! Predict the rest of a flight from three noisy detections, with and
//! without the blur constraint.

use blurtrack::synth::{broadcast_camera, rng, trajectory_case, Recording};
use blurtrack::trajectory::{fit_position, fit_position_blur, mae, BlurFitOptions};

pub fn run() -> (f64, f64) {
    let camera = broadcast_camera(1280, 720);
    let case = trajectory_case(&mut rng(3), &camera, &Recording::default(), 3, 15, 2.0)
        .expect("ball in view");
    let position = fit_position(&case.observations).expect("three observations");
    let blur = fit_position_blur(&case.observations, &BlurFitOptions::default()).expect("fit");
    let mae_position = mae(&position, &case.remaining).expect("ground truth");
    let mae_blur = mae(&blur.trajectory, &case.remaining).expect("ground truth");
    println!("position only   MAE {mae_position:.2} px");
    println!("position + blur MAE {mae_blur:.2} px");
    println!(
        "exposure        {:.2} ms",
        blur.trajectory.t_exp.unwrap_or(0.0) * 1e3
    );
    (mae_position, mae_blur)
}

#[allow(dead_code)]
fn main() {
    run();
}
