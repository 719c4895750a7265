fn main() {
    println!("tsq");
}
