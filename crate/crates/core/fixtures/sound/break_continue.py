class Worker:
    def work(self, n):
        return n

class Idle:
    def work(self, n):
        return 0

def main():
    w = Worker()
    i = 0
    while True:
        i = i + 1
        if i > 5:
            break
        if i == 2:
            w = Idle()
            continue
        w.work(i)
