pub mod poly;
pub mod gb;
pub mod chow;
pub mod segre;
pub mod charcls;
pub mod zeta;
