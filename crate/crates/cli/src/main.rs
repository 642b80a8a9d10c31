fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CREDAL_OT_LOG", "error"))
        .format_timestamp(None)
        .init();
    std::process::exit(credal_ot_cli::run(std::env::args_os()));
}
