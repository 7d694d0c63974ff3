fn main() {
    std::process::exit(blurtrack::commands::main());
}
