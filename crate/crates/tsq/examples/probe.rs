use tsq::catalog::{catalog, CatalogEntry};
use tsq::develop::{develop, DevelopOptions};

fn main() {
    let opts = DevelopOptions::default(); // 1e6
    for entry in [CatalogEntry::X1, CatalogEntry::X2] {
        let base = catalog(entry);
        for r in 3..=6 {
            let t = std::time::Instant::now();
            match develop(&base, "v", r, &opts) {
                Ok(ball) => println!(
                    "{entry} r={r}: OK V={} F={} ({:?})",
                    ball.ball.vertex_count(),
                    ball.ball.face_count(),
                    t.elapsed()
                ),
                Err(e) => {
                    println!("{entry} r={r}: {e} ({:?})", t.elapsed());
                    break;
                }
            }
        }
    }
}
