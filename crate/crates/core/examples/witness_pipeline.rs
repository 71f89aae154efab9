//! End-to-end witness pipeline at desk scale: build the growth certificate,
//! synthesize the interval tower, check levels 2 and 3 over [-10^4, 10^4],
//! then search a witness for the intersection with a shifted copy.
//!
//! Run with `cargo run --release --example witness_pipeline`.

use std::time::Instant;

use syndetic::uss::Certificate;
use syndetic::witness::{check_witness, find_witness, synthesize_witnesses};
use syndetic::{Limits, SetDescriptor};

fn main() {
    let limits = Limits::default();
    let desc = SetDescriptor::Construction42 { k: 1, m: 2 };
    let eval = desc.compile(&limits).unwrap();

    let t = Instant::now();
    let cert = Certificate::for_construction42(1, 2, 6).unwrap();
    println!("certificate: {:?} ({:?})", cert.provenance, t.elapsed());

    let t = Instant::now();
    let tower = synthesize_witnesses(&cert, 3).unwrap();
    for w in &tower {
        let digits = w.radius.to_string();
        let show = if digits.len() > 24 { format!("~10^{}", digits.len() - 1) } else { digits };
        println!("F_{} radius {} (D={:?})", w.n, show, w.d);
    }
    println!("synthesis: {:?}", t.elapsed());

    for w in &tower[1..] {
        let t = Instant::now();
        let rep = check_witness(&eval, w.n, &w.family().unwrap(), -10_000, 10_000).unwrap();
        println!(
            "check F_{}: verified={} translates={} nodes={} ({:?})",
            w.n,
            rep.verified(),
            rep.translates_examined,
            rep.solver_nodes,
            t.elapsed()
        );
    }

    let t = Instant::now();
    let inter = SetDescriptor::intersection(vec![
        desc.clone(),
        SetDescriptor::translate(desc.clone(), 1),
    ]);
    let ieval = inter.compile(&limits).unwrap();
    let out = find_witness(&ieval, 2, -10_000, 10_000, 90).unwrap();
    match &out {
        syndetic::witness::FindOutcome::Found { witness, solver_nodes } => println!(
            "intersection witness: |F|={} max|f|={} nodes={} ({:?})",
            witness.translates.len(),
            witness.translates.iter().map(|f| f.abs()).max().unwrap(),
            solver_nodes,
            t.elapsed()
        ),
        syndetic::witness::FindOutcome::Failed { reason } => {
            println!("intersection FAILED: {reason} ({:?})", t.elapsed())
        }
    }
}
