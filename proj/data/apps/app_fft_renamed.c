/* Spectrum analyzer with locally named buffers. */
void analyze(float *real, float *imag, const float *cos_t, const float *sin_t, int count)
{
    int span, mid, base, off;
    float xr, xi;
    for (span = 4; span <= count; span <<= 1) {
        mid = span >> 1;
        for (base = 0; base < count; base += span) {
            for (off = 0; off < mid; off++) {
                xr = cos_t[off * (count / span)] * real[base + off + mid] - sin_t[off * (count / span)] * imag[base + off + mid];
                xi = cos_t[off * (count / span)] * imag[base + off + mid] + sin_t[off * (count / span)] * real[base + off + mid];
                real[base + off + mid] = real[base + off] - xr;
                imag[base + off + mid] = imag[base + off] - xi;
                real[base + off] = real[base + off] + xr;
                imag[base + off] = imag[base + off] + xi;
            }
        }
    }
}
