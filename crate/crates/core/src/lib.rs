pub mod exactalg;
pub mod permgrp;
pub mod lines27;
pub mod weylact;
pub mod galcoh;
pub mod poly;
pub mod numfield;
pub mod descent;
pub mod fpgeom;
pub mod ptsearch;
pub mod locsym;
pub mod suite;
