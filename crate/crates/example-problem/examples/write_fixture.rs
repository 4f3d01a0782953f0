//! Regenerates the shipped example fixture: `cargo run -p example-problem --example write_fixture [PATH]`.

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/example.toml").to_string());
    std::fs::write(&path, example_problem::example_fixture()).expect("write fixture");
    println!("wrote {path}");
}
