fn main() {
    std::process::exit(lattice_sketch::cli::run());
}
