/* C interface for the elaspec spectral laboratory.
 *
 * Conventions:
 *   - Every fallible call returns an elaspec_status; results travel through
 *     out-pointers.
 *   - Spectrum tables are opaque handles freed with elaspec_spectrum_free.
 *   - Boundary conditions: 0 = Dirichlet, 1 = Neumann.
 *   - Spectrum domains: 0 = interval (scalar Laplacian, `count` modes),
 *     1 = disk (scalar Laplacian, up to lambda_max),
 *     2 = disk (elastic dispersion relations, up to lambda_max).
 */

#ifndef ELASPEC_H
#define ELASPEC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elaspec_status {
  ELASPEC_OK = 0,
  ELASPEC_ERR_INVALID_ARGUMENT = 1,
  ELASPEC_ERR_NUMERICS = 2,
  ELASPEC_ERR_CERTIFICATION = 3,
  ELASPEC_ERR_PANIC = 4,
  ELASPEC_ERR_NULL_POINTER = 5
} elaspec_status;

typedef enum elaspec_bc {
  ELASPEC_BC_DIRICHLET = 0,
  ELASPEC_BC_NEUMANN = 1
} elaspec_bc;

typedef enum elaspec_domain {
  ELASPEC_DOMAIN_INTERVAL = 0,
  ELASPEC_DOMAIN_DISK_SCALAR = 1,
  ELASPEC_DOMAIN_DISK_ELASTIC = 2
} elaspec_domain;

/* Opaque eigenvalue table handle. */
typedef struct ElaspecSpectrum ElaspecSpectrum;

/* Library version string (static storage, do not free). */
const char *elaspec_version(void);

/* Validate a Lame pair: mu > 0 and mu + lambda >= 0. */
int elaspec_moduli_check(double mu, double lambda);

/* Compute an eigenvalue table; writes a handle to *out on success. */
int elaspec_spectrum_compute(int domain, double size, int bc, double mu,
                             double lambda, double lambda_max, size_t count,
                             ElaspecSpectrum **out);

/* Multiplicity-weighted number of eigenvalues. */
size_t elaspec_spectrum_len(const ElaspecSpectrum *spectrum);

/* Copy up to cap ascending eigenvalues (repeated by multiplicity); returns
 * the number written. */
size_t elaspec_spectrum_eigenvalues(const ElaspecSpectrum *spectrum,
                                    double *buffer, size_t cap);

/* Certification edge of the table. */
double elaspec_spectrum_max_reliable(const ElaspecSpectrum *spectrum);

/* Counting function N(lambda); lambda must not exceed the certification
 * edge. */
int elaspec_spectrum_counting(const ElaspecSpectrum *spectrum, double lambda,
                              size_t *out);

/* Partition function Z(t) over a grid of n_t points. */
int elaspec_spectrum_partition_function(const ElaspecSpectrum *spectrum,
                                        int n_dim, const double *t, size_t n_t,
                                        double *out_z);

/* Fit heat-trace coefficients on an automatic grid (num_terms = 2 or 3). */
int elaspec_spectrum_fit_heat(const ElaspecSpectrum *spectrum, int n_dim,
                              int num_terms, double *out_a0, double *out_a1,
                              double *out_a2);

/* Free a spectrum handle (NULL is a no-op). */
void elaspec_spectrum_free(ElaspecSpectrum *spectrum);

/* Two-term heat coefficients for a disk; sigma_h is the mean-curvature
 * orientation switch (+1 or -1). */
int elaspec_disk_heat_coefficients(double mu, double lambda, double radius,
                                   int bc, double sigma_h, double *out_a0,
                                   double *out_a1, double *out_a2);

/* Two-term counting coefficients for a disk (out_a2 receives 0). */
int elaspec_disk_counting_coefficients(double mu, double lambda, double radius,
                                       int bc, double *out_a0, double *out_a1,
                                       double *out_a2);

/* Interior heat density, closed form. */
int elaspec_interior_heat_density(double mu, double lambda, int n_dim,
                                  double t, double *out);

/* Half-space image boundary term, closed form (magnitude; the sign flips
 * with the boundary condition). */
int elaspec_boundary_image_term(double mu, double lambda, int n_dim, double t,
                                double *out);

/* Image heat kernel on the half line (boundary at 0). */
int elaspec_halfline_kernel(double diffusivity, int bc, double t, double x,
                            double y, double *out);

/* Free-space 1D heat kernel. */
double elaspec_free_kernel(double diffusivity, double t, double x, double y);

#ifdef __cplusplus
}
#endif

#endif /* ELASPEC_H */
