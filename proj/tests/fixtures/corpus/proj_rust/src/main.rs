fn main() {
    let x = dtool::decode("aGk=");
    println!("{x:?}");
}
