#pragma once

#include <string>

// Minimal declarations for the GLPK 4.65 C API, written against the
// documented interface so the library can be loaded at runtime without a
// system development package. Struct layouts were verified at runtime: the
// loader checks glp_init_iocp defaults before the backend is used.

extern "C" {

typedef struct glp_prob glp_prob;
typedef struct glp_tree glp_tree;

// optimization direction
inline constexpr int GLP_MIN = 1;
inline constexpr int GLP_MAX = 2;

// simplex method
inline constexpr int GLP_PRIMAL = 1;
inline constexpr int GLP_DUALP = 2; // dual simplex, primal fallback
inline constexpr int GLP_DUAL = 3;

// variable kind
inline constexpr int GLP_CV = 1;
inline constexpr int GLP_IV = 2;

// bound types
inline constexpr int GLP_FR = 1;
inline constexpr int GLP_LO = 2;
inline constexpr int GLP_UP = 3;
inline constexpr int GLP_DB = 4;
inline constexpr int GLP_FX = 5;

// on/off
inline constexpr int GLP_ON = 1;
inline constexpr int GLP_OFF = 0;

// message levels
inline constexpr int GLP_MSG_OFF = 0;
inline constexpr int GLP_MSG_ERR = 1;
inline constexpr int GLP_MSG_ALL = 3;

// solution status
inline constexpr int GLP_UNDEF = 1;
inline constexpr int GLP_FEAS = 2;
inline constexpr int GLP_INFEAS = 3;
inline constexpr int GLP_NOFEAS = 4;
inline constexpr int GLP_OPT = 5;
inline constexpr int GLP_UNBND = 6;

// callback reason codes
inline constexpr int GLP_IROWGEN = 0x01;
inline constexpr int GLP_IBINGO = 0x02;
inline constexpr int GLP_IHEUR = 0x03;

// return codes
inline constexpr int GLP_EBADB = 0x01;
inline constexpr int GLP_ESING = 0x02;
inline constexpr int GLP_ECOND = 0x03;
inline constexpr int GLP_EBOUND = 0x04;
inline constexpr int GLP_EFAIL = 0x05;
inline constexpr int GLP_EOBJLL = 0x06;
inline constexpr int GLP_EOBJUL = 0x07;
inline constexpr int GLP_EITLIM = 0x08;
inline constexpr int GLP_ETMLIM = 0x09;
inline constexpr int GLP_ENOPFS = 0x0A;
inline constexpr int GLP_ENODFS = 0x0B;
inline constexpr int GLP_EROOT = 0x0C;
inline constexpr int GLP_ESTOP = 0x0D;
inline constexpr int GLP_EMIPGAP = 0x0E;

struct glp_smcp {
    int msg_lev;
    int meth;
    int pricing;
    int r_test;
    double tol_bnd;
    double tol_dj;
    double tol_piv;
    double obj_ll;
    double obj_ul;
    int it_lim;
    int tm_lim;
    int out_frq;
    int out_dly;
    int presolve;
    int excl;
    int shift;
    int aorn;
    double foo_bar[33];
};

struct glp_iocp {
    int msg_lev;
    int br_tech;
    int bt_tech;
    double tol_int;
    double tol_obj;
    int tm_lim;
    int out_frq;
    int out_dly;
    void (*cb_func)(glp_tree* T, void* info);
    void* cb_info;
    int cb_size;
    int pp_tech;
    double mip_gap;
    int mir_cuts;
    int gmi_cuts;
    int cov_cuts;
    int clq_cuts;
    int presolve;
    int binarize;
    int fp_heur;
    int ps_heur;
    int ps_tm_lim;
    int sr_heur;
    int use_sol;
    const char* save_sol;
    int alien;
    int flip;
    double foo_bar[23];
};

} // extern "C"

namespace ato::glpk {

/// Function table resolved by dlsym. One global instance, loaded lazily.
struct Api {
    glp_prob* (*create_prob)();
    void (*delete_prob)(glp_prob*);
    void (*set_obj_dir)(glp_prob*, int);
    int (*add_rows)(glp_prob*, int);
    int (*add_cols)(glp_prob*, int);
    void (*set_row_bnds)(glp_prob*, int, int, double, double);
    void (*set_col_bnds)(glp_prob*, int, int, double, double);
    void (*set_obj_coef)(glp_prob*, int, double);
    void (*set_col_kind)(glp_prob*, int, int);
    void (*load_matrix)(glp_prob*, int, const int*, const int*, const double*);
    int (*simplex)(glp_prob*, const glp_smcp*);
    int (*get_status)(glp_prob*);
    double (*get_obj_val)(glp_prob*);
    double (*get_col_prim)(glp_prob*, int);
    int (*intopt)(glp_prob*, const glp_iocp*);
    int (*mip_status)(glp_prob*);
    double (*mip_obj_val)(glp_prob*);
    double (*mip_col_val)(glp_prob*, int);
    void (*init_smcp)(glp_smcp*);
    void (*init_iocp)(glp_iocp*);
    int (*term_out)(int);
    const char* (*version)();
    double (*ios_mip_gap)(glp_tree*);
    int (*ios_reason)(glp_tree*);
    int (*ios_heur_sol)(glp_tree*, const double*);
    int (*free_env)();
};

/// Loads the GLPK shared library and resolves the table. Throws
/// ato::Error on failure; subsequent calls return the cached table.
const Api& api();

/// True if the library can be loaded (never throws).
bool available();

/// Path the loader would use, for diagnostics.
std::string resolved_path();

/// Frees the calling thread's GLPK environment. Worker threads call this
/// before exiting; the TLS build allocates one environment per thread.
void release_thread_state();

} // namespace ato::glpk
