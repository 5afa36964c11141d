/* Signal, crypto and imaging workloads in one application. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#define N 1024

static float re[N], im[N], wr[N / 2], wi[N / 2];
static unsigned char state[16], key[176], tmp[16], sbox[256];
static float img[64 * 64], kern[9], out[64 * 64];

void spectrum(int n)
{
    int len, half, i, k;
    float tr, ti;
    for (len = 2; len <= n; len <<= 1) {
        half = len >> 1;
        for (i = 0; i < n; i += len) {
            for (k = 0; k < half; k++) {
                tr = wr[k * (n / len)] * re[i + k + half] - wi[k * (n / len)] * im[i + k + half];
                ti = wr[k * (n / len)] * im[i + k + half] + wi[k * (n / len)] * re[i + k + half];
                re[i + k + half] = re[i + k] - tr;
                im[i + k + half] = im[i + k] - ti;
                re[i + k] = re[i + k] + tr;
                im[i + k] = im[i + k] + ti;
            }
        }
    }
}

void encrypt_block(int rounds)
{
    int round, j;
    for (round = 0; round < rounds; round++) {
        for (j = 0; j < 16; j++) {
            state[j] = sbox[state[j] ^ key[round * 16 + j]];
        }
        for (j = 0; j < 16; j++) {
            tmp[j] = state[(j * 5) % 16];
        }
        for (j = 0; j < 16; j++) {
            state[j] = tmp[j];
        }
    }
}

void sharpen(int w, int h)
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
    for (i = 0; i < N / 2; i++) {
        wr[i] = cosf(2.0f * 3.14159265f * i / N);
        wi[i] = -sinf(2.0f * 3.14159265f * i / N);
    }
    for (i = 0; i < 256; i++)
        sbox[i] = (unsigned char)((i * 7 + 99) & 0xff);
    memset(key, 0x2b, sizeof key);
    spectrum(N);
    encrypt_block(10);
    sharpen(64, 64);
    printf("%f %d %f\n", re[1], state[0], out[65]);
    return 0;
}
