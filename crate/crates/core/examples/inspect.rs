//! Prints the invariants and loop history of a program.
//!
//! `cargo run -p octolyze-core --example inspect -- corpus/walk_kernel.oct`

use octolyze_core::analyzer::analyze_traced;
use octolyze_core::lang::parse;
use octolyze_core::report::render_invariant;

fn main() {
    let path = std::env::args().nth(1).expect("usage: inspect <file.oct>");
    let src = std::fs::read_to_string(&path).expect("readable file");
    let p = parse(&src).expect("valid program");
    let names = p.var_names();
    let a = analyze_traced(&p);
    for lp in &a.loops {
        println!("loop at {}: {} head values", lp.head, lp.iterations());
        for (n, pass) in lp.passes.iter().enumerate() {
            for (k, o) in pass.iter().enumerate() {
                println!(
                    "  pass {n} l{}: {}",
                    lp.head.0 + k,
                    render_invariant(&o.closed(), &names)
                );
            }
        }
    }
    for (l, o) in a.invariants.iter() {
        println!("{l}: {}", render_invariant(&o.closed(), &names));
    }
}
