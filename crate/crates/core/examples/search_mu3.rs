//! Re-runs the exhaustive search behind the `nilpotent_mu3` corpus entry.
fn main() {
    match ainf_core::corpus::search_nilpotent_mu3() {
        Some(m) => {
            let c = ainf_core::corpus::mu3_candidate(m);
            println!("mask {m:#06x}");
            for (k, v) in c.mu_tensor().sorted() {
                println!("  {k:?} -> {v:?}");
            }
        }
        None => println!("no solution"),
    }
}
