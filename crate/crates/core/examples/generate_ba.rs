//! Grows a Barabási–Albert graph and summarizes its degree sequence.
//!
//! ```text
//! cargo run --example generate_ba -- [m0] [t] [seed]
//! ```

use likedness::graph::{generate_ba, write_edge_list, BaParams};

fn main() -> likedness::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().expect("integer argument"));
    let m0 = args.next().unwrap_or(5) as usize;
    let t = args.next().unwrap_or(95) as usize;
    let seed = args.next().unwrap_or(1);

    let params = BaParams::new(m0, t, seed);
    let graph = generate_ba(&params)?;
    let mut degrees = graph.degrees();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let mean = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;

    println!("{} vertices, {} edges", graph.order(), graph.edge_count());
    println!("mean degree {mean:.2}, largest {:?}", &degrees[..degrees.len().min(8)]);
    let text = write_edge_list(&graph);
    println!("edge list starts:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
