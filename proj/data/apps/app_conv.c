/* Edge filter over a grayscale frame. */
#include <stdio.h>
#include <stdlib.h>

#define W 640
#define H 480

static float frame[W * H];
static float filtered[W * H];
static const float laplace[9] = {0, -1, 0, -1, 4, -1, 0, -1, 0};

void filter_frame(const float *img, const float *kern, float *out, int w, int h)
{
    int x, y, kx, ky;
    float acc;
    for (y = 1; y < h - 1; y++) {
        for (x = 1; x < w - 1; x++) {
            acc = 0;
            for (ky = -1; ky <= 1; ky++) {
                for (kx = -1; kx <= 1; kx++) {
                    acc += img[(y + ky) * w + (x + kx)] * kern[(ky + 1) * 3 + (kx + 1)];
                }
            }
            out[y * w + x] = acc;
        }
    }
}

int main(void)
{
    int i;
    for (i = 0; i < W * H; i++)
        frame[i] = (float)(i % 255);
    filter_frame(frame, laplace, filtered, W, H);
    printf("%f\n", filtered[W + 1]);
    return 0;
}
