//! Convert a label file from streak midpoints to leading edges and back.

use blurtrack::eval::LabelConvention;
use blurtrack::io::csv::{labels_to_string, read_labels, relabel, RELABEL_DECIMALS};

pub fn run() -> (String, String) {
    let original = "Frame,Visibility,X,Y,Theta,L\n\
                    000049,1,581.62,295.26,-152.5,2.8\n\
                    000050,1,570.1,290.04,-150,6.25\n\
                    000051,0,0,0,0,0\n";
    let table = read_labels(original.as_bytes()).expect("valid csv");
    let front =
        labels_to_string(&relabel(&table, LabelConvention::Front), RELABEL_DECIMALS).unwrap();
    println!("front labels:\n{front}");
    let back = read_labels(front.as_bytes()).unwrap();
    let mid =
        labels_to_string(&relabel(&back, LabelConvention::Midpoint), RELABEL_DECIMALS).unwrap();
    println!("back to midpoints:\n{mid}");
    (original.to_string(), mid)
}

#[allow(dead_code)]
fn main() {
    run();
}
