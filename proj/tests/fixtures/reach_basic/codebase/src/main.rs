use std::env;

mod util;

fn main() {
    let input = env::args().nth(1).unwrap_or_default();
    let decoded = dtool::decode(&input);
    let bytes = util::hex_to_bytes(&decoded);
    println!("{}", bytes.len());
}
